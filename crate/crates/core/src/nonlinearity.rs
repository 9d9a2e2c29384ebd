//! Nonlinearity functions f(n) and the intensity-dependent modulation
//! profile derived from them,
//!
//! ```text
//! Omega(n) = (n+1) f^2(n+1) - n f^2(n)
//! ```
//!
//! Every family below is written in terms of the level function
//! `e(n) = n f^2(n)`, so that `Omega(p) = e(p+1) - e(p)`.

use std::cell::RefCell;
use std::fmt;
use std::sync::RwLock;

use astro_float::{BigFloat, Consts, RoundingMode};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// A named f(n) law together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearityFamily {
    /// f(n) = 1, the linear oscillator.
    Identity,
    /// f(n) = sqrt(sinh(lambda n) / (n sinh lambda)), lambda > 0.
    QDeformed { lambda: f64 },
    /// Photon-added coherent states. `m > 0` gives f(n) = 1 - m/(1+n),
    /// `m < 0` gives f(n) = 1 + |m|/(1+n).
    PhotonAdded { m: i32 },
    /// f(n)^2 = (1/n) sum_{j<n} sqrt(1 + mu j), mu >= 0.
    RaiAgarwal { mu: f64 },
    /// A solvable system with known spectrum: f(n) = sqrt(e_n / n).
    CustomSpectrum { levels: Vec<f64> },
}

impl NonlinearityFamily {
    pub fn q_deformed(lambda: f64) -> Result<Self> {
        let family = NonlinearityFamily::QDeformed { lambda };
        family.validate()?;
        Ok(family)
    }

    pub fn photon_added(m: i32) -> Result<Self> {
        let family = NonlinearityFamily::PhotonAdded { m };
        family.validate()?;
        Ok(family)
    }

    pub fn rai_agarwal(mu: f64) -> Result<Self> {
        let family = NonlinearityFamily::RaiAgarwal { mu };
        family.validate()?;
        Ok(family)
    }

    /// Checks the family's parameter invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            NonlinearityFamily::Identity => Ok(()),
            NonlinearityFamily::QDeformed { lambda } => {
                if lambda.is_finite() && *lambda > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("lambda", format!("must be finite and > 0, got {lambda}")))
                }
            }
            NonlinearityFamily::PhotonAdded { m } => {
                if *m != 0 {
                    Ok(())
                } else {
                    Err(Error::invalid("m", "must be a nonzero integer"))
                }
            }
            NonlinearityFamily::RaiAgarwal { mu } => {
                if mu.is_finite() && *mu >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("mu", format!("must be finite and >= 0, got {mu}")))
                }
            }
            NonlinearityFamily::CustomSpectrum { levels } => validate_spectrum(levels),
        }
    }

    /// Snake-case family name, as used on the command line and in fixtures.
    pub fn label(&self) -> &'static str {
        match self {
            NonlinearityFamily::Identity => "identity",
            NonlinearityFamily::QDeformed { .. } => "q_deformed",
            NonlinearityFamily::PhotonAdded { .. } => "photon_added",
            NonlinearityFamily::RaiAgarwal { .. } => "rai_agarwal",
            NonlinearityFamily::CustomSpectrum { .. } => "custom",
        }
    }

    /// Parameters as a JSON object (`{}` for identity).
    pub fn params_json(&self) -> Value {
        match self {
            NonlinearityFamily::Identity => json!({}),
            NonlinearityFamily::QDeformed { lambda } => json!({ "lambda": lambda }),
            NonlinearityFamily::PhotonAdded { m } => json!({ "m": m }),
            NonlinearityFamily::RaiAgarwal { mu } => json!({ "mu": mu }),
            NonlinearityFamily::CustomSpectrum { levels } => json!({ "levels": levels }),
        }
    }

    /// Inverse of [`label`](Self::label) + [`params_json`](Self::params_json).
    pub fn from_label_params(label: &str, params: &Value) -> Result<Self> {
        let real = |key: &'static str| -> Result<f64> {
            params
                .get(key)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::invalid(key, "missing or not a number"))
        };
        let family = match label {
            "identity" => NonlinearityFamily::Identity,
            "q_deformed" => NonlinearityFamily::QDeformed { lambda: real("lambda")? },
            "photon_added" => {
                let m = params
                    .get("m")
                    .and_then(Value::as_i64)
                    .and_then(|m| i32::try_from(m).ok())
                    .ok_or_else(|| Error::invalid("m", "missing or not an integer"))?;
                NonlinearityFamily::PhotonAdded { m }
            }
            "rai_agarwal" => NonlinearityFamily::RaiAgarwal { mu: real("mu")? },
            "custom" => {
                let levels = params
                    .get("levels")
                    .and_then(Value::as_array)
                    .and_then(|xs| xs.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| Error::invalid("levels", "missing or not a list of numbers"))?;
                NonlinearityFamily::CustomSpectrum { levels }
            }
            other => return Err(Error::invalid("family", format!("unknown family {other:?}"))),
        };
        family.validate()?;
        Ok(family)
    }

    /// Whether Omega has a closed form at real (non-integer) occupation.
    pub fn has_real_extension(&self) -> bool {
        !matches!(self, NonlinearityFamily::CustomSpectrum { .. })
    }
}

impl fmt::Display for NonlinearityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearityFamily::Identity => write!(f, "identity"),
            NonlinearityFamily::QDeformed { lambda } => write!(f, "q_deformed(lambda={lambda})"),
            NonlinearityFamily::PhotonAdded { m } => write!(f, "photon_added(m={m})"),
            NonlinearityFamily::RaiAgarwal { mu } => write!(f, "rai_agarwal(mu={mu})"),
            NonlinearityFamily::CustomSpectrum { levels } => {
                write!(f, "custom({} levels)", levels.len())
            }
        }
    }
}

fn validate_spectrum(levels: &[f64]) -> Result<()> {
    match levels.first() {
        None => return Err(Error::InvalidSpectrum("spectrum is empty".into())),
        Some(&e0) if e0 != 0.0 => {
            return Err(Error::InvalidSpectrum(format!("e[0] must be 0, got {e0}")))
        }
        _ => {}
    }
    for (n, &e) in levels.iter().enumerate().skip(1) {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidSpectrum(format!("e[{n}] must be finite and > 0, got {e}")));
        }
    }
    Ok(())
}

/// Builds the nonlinearity of a solvable system from its discrete spectrum
/// (in units of the base quantum), so that n f^2(n) = e_n.
pub fn spectrum_to_family(levels: Vec<f64>) -> Result<NonlinearityFamily> {
    validate_spectrum(&levels)?;
    Ok(NonlinearityFamily::CustomSpectrum { levels })
}

/// Omega evaluated for one nonlinearity family.
///
/// Immutable from the caller's point of view; the Rai-Agarwal partial sums
/// are memoised internally and extended on demand in ascending order, so
/// results do not depend on which thread asked first.
#[derive(Debug)]
pub struct ModulationProfile {
    family: NonlinearityFamily,
    // S(n) = sum_{j<n} sqrt(1 + mu j); only used by RaiAgarwal.
    prefix: RwLock<Vec<f64>>,
}

impl Clone for ModulationProfile {
    fn clone(&self) -> Self {
        let prefix = self.prefix.read().map(|v| v.clone()).unwrap_or_else(|_| vec![0.0]);
        ModulationProfile { family: self.family.clone(), prefix: RwLock::new(prefix) }
    }
}

impl ModulationProfile {
    pub fn new(family: NonlinearityFamily) -> Result<Self> {
        family.validate()?;
        Ok(ModulationProfile { family, prefix: RwLock::new(vec![0.0]) })
    }

    pub fn identity() -> Self {
        ModulationProfile { family: NonlinearityFamily::Identity, prefix: RwLock::new(vec![0.0]) }
    }

    pub fn family(&self) -> &NonlinearityFamily {
        &self.family
    }

    /// The nonlinearity function f(n). Indeterminate forms at n = 0 are
    /// defined as 1; f(0) never enters Omega.
    pub fn eval_f(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        Ok(match &self.family {
            NonlinearityFamily::Identity => 1.0,
            NonlinearityFamily::QDeformed { lambda } => {
                if n == 0 {
                    1.0
                } else {
                    ((lambda * nf).sinh() / (nf * lambda.sinh())).sqrt()
                }
            }
            NonlinearityFamily::PhotonAdded { m } => 1.0 - f64::from(*m) / (1.0 + nf),
            NonlinearityFamily::RaiAgarwal { mu } => {
                if n == 0 {
                    1.0
                } else {
                    (self.partial_sum(*mu, n) / nf).sqrt()
                }
            }
            NonlinearityFamily::CustomSpectrum { levels } => {
                let e = *levels.get(n).ok_or(Error::Domain { index: n, len: levels.len() })?;
                if n == 0 {
                    1.0
                } else {
                    (e / nf).sqrt()
                }
            }
        })
    }

    /// Level function e(n) = n f^2(n). Custom spectra return e_n verbatim so
    /// that their Omega is an exact difference of the supplied levels.
    pub fn level(&self, n: usize) -> Result<f64> {
        match &self.family {
            NonlinearityFamily::CustomSpectrum { levels } => {
                levels.get(n).copied().ok_or(Error::Domain { index: n, len: levels.len() })
            }
            NonlinearityFamily::QDeformed { lambda } => Ok(to_f64(&q_deformed_level(*lambda, n))),
            _ => {
                let f = self.eval_f(n)?;
                Ok(n as f64 * f * f)
            }
        }
    }

    /// Omega(p) = (p+1) f^2(p+1) - p f^2(p). May be zero or negative for
    /// photon-added families; positivity is the eigensystem's concern.
    pub fn omega(&self, p: usize) -> Result<f64> {
        match self.family {
            NonlinearityFamily::Identity => Ok(1.0),
            NonlinearityFamily::QDeformed { lambda } => Ok(q_deformed_gap(lambda, p)),
            _ => Ok(self.level(p + 1)? - self.level(p)?),
        }
    }

    /// Closed-form Omega at real occupation `x >= 0`, used for a classical
    /// (c-number) modulation source.
    pub fn omega_real(&self, x: f64) -> Result<f64> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::invalid("x", format!("must be finite and >= 0, got {x}")));
        }
        Ok(match &self.family {
            NonlinearityFamily::Identity => 1.0,
            NonlinearityFamily::QDeformed { lambda } => q_deformed_omega_real(*lambda, x),
            NonlinearityFamily::PhotonAdded { m } => {
                let m = f64::from(*m);
                let upper = (x + 2.0 - m) / (x + 2.0);
                let lower = (x + 1.0 - m) / (x + 1.0);
                (x + 1.0) * upper * upper - x * lower * lower
            }
            NonlinearityFamily::RaiAgarwal { mu } => (1.0 + mu * x).sqrt(),
            NonlinearityFamily::CustomSpectrum { .. } => {
                return Err(Error::UnsupportedExtension { family: "custom spectrum" })
            }
        })
    }

    fn partial_sum(&self, mu: f64, n: usize) -> f64 {
        if let Ok(prefix) = self.prefix.read() {
            if let Some(&s) = prefix.get(n) {
                return s;
            }
        }
        let mut prefix = match self.prefix.write() {
            Ok(guard) => guard,
            Err(poisoned) => poisoned.into_inner(),
        };
        while prefix.len() <= n {
            let j = prefix.len() - 1;
            let next = prefix[j] + (1.0 + mu * j as f64).sqrt();
            prefix.push(next);
        }
        prefix[n]
    }
}

// The q-deformed levels grow like e^{lambda n}, so e(p+1) - e(p) cancels a
// few bits and the f64 route ends up 1-3 ulp off. Working at 192 bits and
// rounding once gives the correctly rounded gap.
const EXTENDED_BITS: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache allocates"));
}

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, EXTENDED_BITS)
}

/// e(n) = n f^2(n) with f^2(n) = sinh(lambda n) / (n sinh lambda).
fn q_deformed_level(lambda: f64, n: usize) -> BigFloat {
    if n == 0 {
        return big(0.0);
    }
    let nb = big(n as f64);
    let l = big(lambda);
    CONSTS.with(|c| {
        let cc = &mut c.borrow_mut();
        let num = l.mul(&nb, EXTENDED_BITS, RM).sinh(EXTENDED_BITS, RM, cc);
        let den = nb.mul(&l.sinh(EXTENDED_BITS, RM, cc), EXTENDED_BITS, RM);
        nb.mul(&num.div(&den, EXTENDED_BITS, RM), EXTENDED_BITS, RM)
    })
}

fn q_deformed_gap(lambda: f64, p: usize) -> f64 {
    let upper = q_deformed_level(lambda, p + 1);
    let lower = q_deformed_level(lambda, p);
    to_f64(&upper.sub(&lower, EXTENDED_BITS, RM))
}

/// cosh(lambda (2x+1)/2) / cosh(lambda/2).
fn q_deformed_omega_real(lambda: f64, x: f64) -> f64 {
    let l = big(lambda);
    let half = big(0.5);
    let arg = big(x).add(&half, EXTENDED_BITS, RM).mul(&l, EXTENDED_BITS, RM);
    CONSTS.with(|c| {
        let cc = &mut c.borrow_mut();
        let num = arg.cosh(EXTENDED_BITS, RM, cc);
        let den = l.mul(&half, EXTENDED_BITS, RM).cosh(EXTENDED_BITS, RM, cc);
        to_f64(&num.div(&den, EXTENDED_BITS, RM))
    })
}

/// Nearest double. The decimal rendering carries ~58 digits, far more than
/// the 17 a double needs, so the parse rounds correctly.
pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().expect("finite BigFloat renders as a decimal")
}
