//! Eigenstructure of the oscillator at fixed QSM occupation p.
//!
//! At fixed p the modulated Hamiltonian is an ordinary oscillator with
//! frequency `omega * Omega(p)`. Natural units hbar = m = 1 throughout, so the
//! inverse length scale is `alpha_p = sqrt(omega * Omega(p))`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// What to do when Omega(p) <= 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaPolicy {
    /// Reject Omega <= 0.
    #[default]
    Strict,
    /// Use |Omega| and record a warning. Omega = 0 is still rejected.
    Absolute,
}

impl FromStr for OmegaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(OmegaPolicy::Strict),
            "absolute" | "abs" => Ok(OmegaPolicy::Absolute),
            other => Err(Error::invalid("omega_policy", format!("expected strict|absolute, got {other:?}"))),
        }
    }
}

impl fmt::Display for OmegaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OmegaPolicy::Strict => "strict",
            OmegaPolicy::Absolute => "absolute",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParameters {
    /// Base angular frequency.
    pub omega: f64,
    /// Effective (policy-resolved, strictly positive) modulation value.
    pub omega_p: f64,
    /// beta_p^2 = 2 Omega / (1 + Omega).
    pub beta_sq: f64,
    /// Modulation value before policy resolution.
    pub raw_omega_p: f64,
}

impl ModeParameters {
    /// True when the absolute policy replaced a negative Omega by |Omega|.
    pub fn substituted(&self) -> bool {
        self.raw_omega_p != self.omega_p
    }

    pub fn alpha_p(&self) -> f64 {
        (self.omega * self.omega_p).sqrt()
    }

    /// beta^2 - 1 = (Omega - 1)/(Omega + 1), always in (-1, 1).
    pub fn beta_sq_minus_one(&self) -> f64 {
        (self.omega_p - 1.0) / (self.omega_p + 1.0)
    }

    /// Effective oscillation frequency omega * Omega.
    pub fn frequency(&self) -> f64 {
        self.omega * self.omega_p
    }
}

pub fn mode_parameters(omega: f64, omega_p: f64, policy: OmegaPolicy) -> Result<ModeParameters> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be finite and > 0, got {omega}")));
    }
    if omega_p.is_nan() {
        return Err(Error::invalid("Omega_p", "is NaN"));
    }
    let effective = match policy {
        OmegaPolicy::Strict if omega_p <= 0.0 => {
            return Err(Error::NonPositiveOmega { omega: omega_p, p: None })
        }
        OmegaPolicy::Absolute if omega_p == 0.0 => return Err(Error::ZeroOmega { p: None }),
        OmegaPolicy::Strict => omega_p,
        OmegaPolicy::Absolute => omega_p.abs(),
    };
    Ok(ModeParameters {
        omega,
        omega_p: effective,
        beta_sq: 2.0 * effective / (1.0 + effective),
        raw_omega_p: omega_p,
    })
}

/// E_n = omega Omega (n + 1/2), in units of hbar.
pub fn energy(mode: &ModeParameters, n: usize) -> f64 {
    mode.frequency() * (n as f64 + 0.5)
}

/// Physicists' Hermite polynomial by three-term recurrence. Overflows for
/// large `n`; use [`wavefunction`] for normalised eigenfunctions.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

const RESCALE_ABOVE: f64 = 1e150;

/// Normalised eigenfunction psi_n(x) of the oscillator with frequency
/// `omega * Omega_p`.
///
/// Runs the orthonormal Hermite-function recurrence without the Gaussian
/// factor, rescaling as it goes, and applies `exp(-xi^2/2)` in log space at
/// the end so neither side overflows for large `n` or `|x|`.
pub fn wavefunction(mode: &ModeParameters, n: usize, x: f64) -> f64 {
    let alpha = mode.alpha_p();
    let xi = alpha * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut log_scale = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
    }
    if cur == 0.0 {
        return 0.0;
    }
    let magnitude = (cur.abs().ln() + log_scale - 0.5 * xi * xi).exp();
    alpha.sqrt() * magnitude.copysign(cur)
}

/// |<psi_l^p | phi_0>|^2: overlap of the modulated l-th eigenstate with the
/// unmodulated ground state.
///
/// Zero for odd `l`. For `l = 2k`,
/// `(beta^2 / sqrt(Omega)) * C(2k, k) / 4^k * (beta^2 - 1)^(2k)`.
pub fn overlap_sq_ground(mode: &ModeParameters, l: usize) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    GroundOverlaps::new(mode).nth(l / 2).unwrap_or(0.0)
}

/// The nonzero overlaps |<psi_2k|phi_0>|^2 for k = 0, 1, 2, ...
///
/// The binomial factor and the power are accumulated together by their
/// term ratio `(beta^2-1)^2 (2k-1)/(2k)`, so nothing overflows and large `k`
/// underflows cleanly to 0.
#[derive(Debug, Clone)]
pub struct GroundOverlaps {
    z: f64,
    k: usize,
    term: f64,
}

impl GroundOverlaps {
    pub fn new(mode: &ModeParameters) -> Self {
        GroundOverlaps {
            z: mode.beta_sq_minus_one().powi(2),
            k: 0,
            term: mode.beta_sq / mode.omega_p.sqrt(),
        }
    }

    /// (beta^2 - 1)^2, the asymptotic ratio of successive terms.
    pub fn ratio(&self) -> f64 {
        self.z
    }
}

impl Iterator for GroundOverlaps {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let current = self.term;
        self.k += 1;
        let kf = self.k as f64;
        self.term *= self.z * (2.0 * kf - 1.0) / (2.0 * kf);
        Some(current)
    }
}
