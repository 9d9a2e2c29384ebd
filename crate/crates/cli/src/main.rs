//! `nlspring`: time-grid scans of the nonlinear optical spring.

mod error;
mod output;
mod plot;
mod request;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlspring::format::sig17;
use nlspring::{scan, ModulationProfile, Spring};

use error::CliError;
use request::{Format, ScanRequest, Settings};

#[derive(Parser, Debug)]
#[command(name = "nlspring", version, about = "Return probability and squeezing of nonlinear optical springs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Evaluate P0, P_cl, S_x, S_p on a uniform tau = omega t / (2 pi) grid.
    Scan(ScanArgs),
    /// Print f(p) and Omega(p) for p = 0..=p-max.
    Profile(ProfileArgs),
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// identity | q_deformed | photon_added | rai_agarwal | custom
    #[arg(long)]
    family: Option<String>,
    /// q-deformation parameter (q_deformed)
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Rai-Agarwal coupling (rai_agarwal)
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Photon-added order, signed (photon_added)
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// Level file for custom: one real per line, line n holding e_n, e_0 = 0
    #[arg(long)]
    spectrum: Option<String>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Mean photon number of the coherent source
    #[arg(long, allow_hyphen_values = true)]
    nbar: Option<String>,
    /// Base oscillator frequency [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau_start: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau_end: Option<String>,
    /// Grid points including both ends [default: 1001]
    #[arg(long, allow_hyphen_values = true)]
    steps: Option<String>,
    /// Comma-separated subset of p0,pcl,sx,sp
    #[arg(long)]
    quantities: Option<String>,
    /// Output file; standard output when omitted or "-"
    #[arg(long)]
    out: Option<String>,
    /// csv | json [default: csv]
    #[arg(long)]
    format: Option<String>,
    /// Also write an SVG line chart to this path
    #[arg(long)]
    plot: Option<String>,
    /// Poisson truncation tolerance [default: 1e-12]
    #[arg(long, allow_hyphen_values = true)]
    eps_trunc: Option<String>,
    /// Largest photon number the Poisson support may reach [default: 1024]
    #[arg(long, allow_hyphen_values = true)]
    p_max: Option<String>,
    /// strict (Omega <= 0 is an error) | absolute (use |Omega|)
    #[arg(long)]
    omega_policy: Option<String>,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Last row printed [default: 10]
    #[arg(long, allow_hyphen_values = true)]
    p_max: Option<String>,
}

fn settings(family: &FamilyArgs, extra: &[(&str, &Option<String>)]) -> Result<Settings, CliError> {
    let mut s = match &family.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let family_flags = [
        ("family", &family.family),
        ("lambda", &family.lambda),
        ("mu", &family.mu),
        ("m", &family.m),
        ("spectrum", &family.spectrum),
    ];
    for (key, value) in family_flags.iter().chain(extra) {
        s.set_flag(key, value.as_ref());
    }
    Ok(s)
}

fn run_scan(args: &ScanArgs) -> Result<(), CliError> {
    let s = settings(
        &args.family,
        &[
            ("nbar", &args.nbar),
            ("omega", &args.omega),
            ("tau-start", &args.tau_start),
            ("tau-end", &args.tau_end),
            ("steps", &args.steps),
            ("quantities", &args.quantities),
            ("out", &args.out),
            ("format", &args.format),
            ("plot", &args.plot),
            ("eps-trunc", &args.eps_trunc),
            ("p-max", &args.p_max),
            ("omega-policy", &args.omega_policy),
        ],
    )?;
    let req = ScanRequest::from_settings(&s)?;
    let spring = Spring::new(req.config, ModulationProfile::new(req.family.clone())?)?;
    let result = scan(&spring, &req.grid, &req.quantities)?;

    let emit = |w: &mut dyn Write| match req.format {
        Format::Csv => output::write_csv(w, &result),
        Format::Json => output::write_json(w, &result),
    };
    match &req.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            emit(&mut BufWriter::new(file))?;
        }
        None => emit(&mut io::stdout().lock())?,
    }
    if let Some(path) = &req.plot {
        fs::write(path, plot::render_svg(&result)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }

    eprintln!("{}", output::summary(&result.diagnostics));
    for w in &result.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn run_profile(args: &ProfileArgs) -> Result<(), CliError> {
    let s = settings(&args.family, &[])?;
    let p_max: usize = match &args.p_max {
        Some(v) => v.parse().map_err(|_| CliError::Validation(format!("--p-max: not an integer: {v:?}")))?,
        None => 10,
    };
    let profile = ModulationProfile::new(s.family()?)?;
    let mut rows = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        rows.push((p, profile.eval_f(p)?, profile.omega(p)?));
    }
    let mut out = io::stdout().lock();
    writeln!(out, "{:>6}  {:<24}  omega", "p", "f")?;
    for (p, f, omega) in rows {
        writeln!(out, "{p:>6}  {:<24}  {}", sig17(f), sig17(omega))?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            // keep usage errors on one line like every other validation failure
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("error: {}", CliError::Validation(first.to_string()));
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Scan(args) => run_scan(args),
        Command::Profile(args) => run_profile(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
