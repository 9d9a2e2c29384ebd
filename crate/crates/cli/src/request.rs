//! Resolution of scan/profile requests from flags and key=value files.
//! Every setting goes through the same string parser, so a value read from
//! a file and the same value given as a flag behave identically.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use nlspring::{
    spectrum_to_family, NonlinearityFamily, Quantity, SpringConfig, TauGrid, DEFAULT_EPS_TRUNC,
    DEFAULT_P_MAX_CAP,
};

use crate::error::CliError;

/// Raw settings keyed by flag name without the leading dashes.
#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
    from_flags: BTreeSet<String>,
    base_dir: Option<PathBuf>,
}

fn normalize_key(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('_', "-")
}

impl Settings {
    /// Reads `key = value` lines; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let mut settings = Settings::parse(&text)?;
        settings.base_dir = path.parent().map(Path::to_path_buf);
        Ok(settings)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key=value", lineno + 1)))?;
            values.insert(normalize_key(key), value.trim().to_string());
        }
        Ok(Settings { values, ..Settings::default() })
    }

    /// Command-line values win over file values.
    pub fn set_flag(&mut self, key: &str, value: Option<&String>) {
        if let Some(v) = value {
            let key = normalize_key(key);
            self.values.insert(key.clone(), v.clone());
            self.from_flags.insert(key);
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn real(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Validation(format!("--{key}: not a number: {v:?}")))
                    .and_then(|x| {
                        if x.is_finite() {
                            Ok(x)
                        } else {
                            Err(CliError::Validation(format!("--{key}: must be finite")))
                        }
                    })
            })
            .transpose()
    }

    fn integer<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Validation(format!("--{key}: not an integer: {v:?}"))))
            .transpose()
    }

    fn require_real(&self, key: &str) -> Result<f64, CliError> {
        self.real(key)?.ok_or_else(|| CliError::Validation(format!("--{key} is required")))
    }

    /// Relative paths from a config file resolve against the file's directory.
    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(|v| {
            let p = PathBuf::from(v);
            match &self.base_dir {
                Some(dir) if p.is_relative() && !self.from_flags.contains(key) => dir.join(p),
                _ => p,
            }
        })
    }

    pub fn family(&self) -> Result<NonlinearityFamily, CliError> {
        let name = self.get("family").ok_or_else(|| CliError::Validation("--family is required".into()))?;
        let family = match name.replace('-', "_").as_str() {
            "identity" => NonlinearityFamily::Identity,
            "q_deformed" | "q" => NonlinearityFamily::QDeformed { lambda: self.require_real("lambda")? },
            "photon_added" | "pacs" => {
                let m = self
                    .integer::<i32>("m")?
                    .ok_or_else(|| CliError::Validation("--m is required for photon_added".into()))?;
                NonlinearityFamily::PhotonAdded { m }
            }
            "rai_agarwal" | "ra" => NonlinearityFamily::RaiAgarwal { mu: self.require_real("mu")? },
            "custom" | "spectrum" => {
                let path = self
                    .path("spectrum")
                    .ok_or_else(|| CliError::Validation("--spectrum is required for custom".into()))?;
                spectrum_to_family(read_spectrum(&path)?)?
            }
            other => {
                return Err(CliError::Validation(format!(
                    "--family: unknown family {other:?} (identity|q_deformed|photon_added|rai_agarwal|custom)"
                )))
            }
        };
        family.validate()?;
        Ok(family)
    }
}

/// One real per line; line n holds e_n. Trailing blank lines are ignored.
pub fn read_spectrum(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read spectrum {}: {e}", path.display())))?;
    let mut lines: Vec<&str> = text.lines().map(str::trim).collect();
    while lines.last() == Some(&"") {
        lines.pop();
    }
    lines
        .iter()
        .enumerate()
        .map(|(n, line)| {
            line.parse::<f64>()
                .map_err(|_| CliError::Validation(format!("spectrum line {n}: not a number: {line:?}")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct ScanRequest {
    pub family: NonlinearityFamily,
    pub config: SpringConfig,
    pub grid: TauGrid,
    pub quantities: Vec<Quantity>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub plot: Option<PathBuf>,
}

impl ScanRequest {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let family = s.family()?;
        let config = SpringConfig {
            omega: s.real("omega")?.unwrap_or(1.0),
            nbar: s.require_real("nbar")?,
            eps_trunc: s.real("eps-trunc")?.unwrap_or(DEFAULT_EPS_TRUNC),
            p_max_cap: s.integer("p-max")?.unwrap_or(DEFAULT_P_MAX_CAP),
            omega_policy: s.get("omega-policy").map(str::parse).transpose()?.unwrap_or_default(),
        };
        config.validate()?;
        let grid = TauGrid::new(
            s.real("tau-start")?.unwrap_or(0.0),
            s.require_real("tau-end")?,
            s.integer("steps")?.unwrap_or(1001),
        )?;
        let quantities = match s.get("quantities") {
            Some(list) => Quantity::parse_list(list)?,
            None if family.has_real_extension() => Quantity::ALL.to_vec(),
            None => vec![Quantity::P0, Quantity::Sx, Quantity::Sp],
        };
        if quantities.contains(&Quantity::Pcl) && !family.has_real_extension() {
            return Err(CliError::Validation(
                "--quantities: pcl needs a real-argument profile; custom spectra have none".into(),
            ));
        }
        let format = match s.get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(CliError::Validation(format!("--format: expected csv|json, got {other:?}"))),
        };
        Ok(ScanRequest {
            family,
            config,
            grid,
            quantities,
            out: s.path("out").filter(|p| p.as_os_str() != "-"),
            format,
            plot: s.path("plot"),
        })
    }
}
