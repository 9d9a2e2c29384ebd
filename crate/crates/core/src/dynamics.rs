//! Return amplitude A_p, Poisson weights of the coherent QSM, the return
//! probability P0(t) and its classical-source counterpart P_cl(t).
//!
//! Time `t` is in natural units (hbar = m = 1); scans use the dimensionless
//! tau = omega t / (2 pi).

use num_complex::Complex64;

use crate::eigensystem::{mode_parameters, GroundOverlaps, ModeParameters, OmegaPolicy};
use crate::error::{Error, Result};
use crate::nonlinearity::ModulationProfile;
use crate::squeezing::SqueezeSupport;

pub const DEFAULT_EPS_TRUNC: f64 = 1e-12;
pub const DEFAULT_P_MAX_CAP: usize = 1024;

/// Physical and numerical parameters of a spring run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringConfig {
    /// Base angular frequency.
    pub omega: f64,
    /// Mean photon number |alpha|^2 of the coherent QSM.
    pub nbar: f64,
    /// Tolerated Poisson mass outside the support.
    pub eps_trunc: f64,
    /// Largest occupation p ever included.
    pub p_max_cap: usize,
    pub omega_policy: OmegaPolicy,
}

impl SpringConfig {
    pub fn new(nbar: f64) -> Self {
        SpringConfig {
            omega: 1.0,
            nbar,
            eps_trunc: DEFAULT_EPS_TRUNC,
            p_max_cap: DEFAULT_P_MAX_CAP,
            omega_policy: OmegaPolicy::Strict,
        }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_eps_trunc(mut self, eps_trunc: f64) -> Self {
        self.eps_trunc = eps_trunc;
        self
    }

    pub fn with_p_max_cap(mut self, p_max_cap: usize) -> Self {
        self.p_max_cap = p_max_cap;
        self
    }

    pub fn with_policy(mut self, policy: OmegaPolicy) -> Self {
        self.omega_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid("omega", format!("must be finite and > 0, got {}", self.omega)));
        }
        validate_poisson(self.nbar, self.eps_trunc, self.p_max_cap)
    }

    /// Converts tau = omega t / (2 pi) to t.
    pub fn time_from_tau(&self, tau: f64) -> f64 {
        2.0 * std::f64::consts::PI * tau / self.omega
    }
}

fn validate_poisson(nbar: f64, eps_trunc: f64, p_max_cap: usize) -> Result<()> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::invalid("nbar", format!("must be finite and >= 0, got {nbar}")));
    }
    if !(eps_trunc > 0.0 && eps_trunc < 1.0) {
        return Err(Error::invalid("eps_trunc", format!("must lie in (0, 1), got {eps_trunc}")));
    }
    if p_max_cap < 1 {
        return Err(Error::invalid("p_max_cap", "must be >= 1"));
    }
    Ok(())
}

/// Successive Poisson weights Q(0), Q(1), ... by the ratio recurrence
/// Q(p+1) = Q(p) nbar / (p+1). Runs in log space when e^{-nbar} would be
/// subnormal.
#[derive(Debug, Clone)]
pub(crate) struct PoissonTerms {
    nbar: f64,
    next_p: usize,
    value: f64,
    log_value: Option<f64>,
}

const LOG_DOMAIN_ABOVE: f64 = 700.0;

impl PoissonTerms {
    pub(crate) fn new(nbar: f64) -> Self {
        if nbar > LOG_DOMAIN_ABOVE {
            PoissonTerms { nbar, next_p: 0, value: 0.0, log_value: Some(-nbar) }
        } else {
            PoissonTerms { nbar, next_p: 0, value: (-nbar).exp(), log_value: None }
        }
    }

    /// Restarts the sequence after `p` with the known weight at `p`.
    pub(crate) fn resume(nbar: f64, p: usize) -> Self {
        let mut terms = PoissonTerms::new(nbar);
        for _ in 0..=p {
            terms.next();
        }
        terms
    }
}

impl Iterator for PoissonTerms {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        let p = self.next_p;
        let q = match self.log_value {
            Some(lq) => lq.exp(),
            None => self.value,
        };
        let ratio_den = (p + 1) as f64;
        match self.log_value.as_mut() {
            Some(lq) => *lq += self.nbar.ln() - ratio_den.ln(),
            None => self.value *= self.nbar / ratio_den,
        }
        self.next_p += 1;
        Some((p, q))
    }
}

/// Truncated Poisson support of the coherent QSM.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    /// `weights[p] = Q(p)` for p = 0..=P.
    pub weights: Vec<f64>,
    /// 1 minus the captured mass (clamped at 0).
    pub residual: f64,
    /// True when `p_max_cap` bound before the tolerance was met.
    pub cap_hit: bool,
    pub cap: usize,
}

impl PoissonWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn last_p(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().copied().enumerate()
    }

    /// Turns a binding cap into an error.
    pub fn ensure_converged(&self) -> Result<()> {
        if self.cap_hit {
            Err(Error::TruncationCapHit { cap: self.cap, residual: self.residual })
        } else {
            Ok(())
        }
    }
}

/// Poisson weights for p = 0..=P, where P is the first index whose
/// cumulative mass reaches `1 - eps_trunc`, or `p_max_cap` if that comes
/// first (reported through `cap_hit`, not as an error).
pub fn poisson_weights(nbar: f64, eps_trunc: f64, p_max_cap: usize) -> Result<PoissonWeights> {
    validate_poisson(nbar, eps_trunc, p_max_cap)?;
    let mut weights = Vec::new();
    let mut mass = 0.0;
    let mut cap_hit = true;
    for (p, q) in PoissonTerms::new(nbar) {
        weights.push(q);
        mass += q;
        if mass >= 1.0 - eps_trunc || poisson_tail_bound(nbar, p, q) < eps_trunc {
            cap_hit = false;
            break;
        }
        if p >= p_max_cap {
            break;
        }
    }
    Ok(PoissonWeights { weights, residual: (1.0 - mass).max(0.0), cap_hit, cap: p_max_cap })
}

// Upper bound on sum_{k>p} Q(k) from the ratio test; infinite until the
// terms start decreasing. Only guards against the cumulative sum stalling a
// few ulps short of 1 - eps.
fn poisson_tail_bound(nbar: f64, p: usize, q: f64) -> f64 {
    let ratio = nbar / (p + 2) as f64;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    q * (nbar / (p + 1) as f64) / (1.0 - ratio)
}

/// Complex return amplitude at fixed QSM occupation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeA {
    pub value: Complex64,
    /// QSM occupation, when evaluated through a [`Spring`].
    pub p: Option<usize>,
    pub t: f64,
}

impl AmplitudeA {
    /// |A_p|^2, the fixed-p return probability.
    pub fn norm_sqr(&self) -> f64 {
        self.value.norm_sqr()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")))
    }
}

/// Closed form
/// `A = beta^2 / (sqrt(Omega) * sqrt(1 - (beta^2-1)^2 exp(-2i omega Omega t)))`.
///
/// |beta^2 - 1| < 1 keeps `1 - z` in the right half plane, so the principal
/// square root is continuous in t. The phase convention follows the series
/// sum over exp(-i omega Omega t l), without the zero-point half quantum.
pub(crate) fn amplitude_closed(mode: &ModeParameters, t: f64) -> Complex64 {
    // 1 - z e^{-i theta} with theta = 2 omega Omega t, written to avoid the
    // cancellation in 1 - z when Omega is far from 1:
    //   1 - z = 4 Omega / (1 + Omega)^2,  1 - cos(theta) = 2 sin^2(theta / 2)
    let d = mode.beta_sq_minus_one();
    let z = d * d;
    let one_minus_z = 4.0 * mode.omega_p / (1.0 + mode.omega_p).powi(2);
    let half = mode.frequency() * t;
    let s = half.sin();
    let base = Complex64::new(one_minus_z + 2.0 * z * s * s, z * (2.0 * half).sin());
    Complex64::new(mode.beta_sq, 0.0) / (mode.omega_p.sqrt() * base.sqrt())
}

/// Direct sum over even l of exp(-i omega Omega t l) |<psi_l|phi_0>|^2,
/// stopped once the geometric tail bound falls below `tail_tol`.
pub(crate) fn amplitude_series(mode: &ModeParameters, t: f64, tail_tol: f64) -> Complex64 {
    let phase_step = mode.frequency() * t;
    let overlaps = GroundOverlaps::new(mode);
    let z = overlaps.ratio();
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, weight) in overlaps.enumerate() {
        let l = 2 * k;
        sum += Complex64::from_polar(weight, -phase_step * l as f64);
        // later terms shrink by at least a factor z each
        if weight == 0.0 || weight * z / (1.0 - z) < tail_tol {
            break;
        }
    }
    sum
}

pub fn a_p_closed(omega_p: f64, omega: f64, t: f64) -> Result<AmplitudeA> {
    check_time(t)?;
    let mode = mode_parameters(omega, omega_p, OmegaPolicy::Strict)?;
    Ok(AmplitudeA { value: amplitude_closed(&mode, t), p: None, t })
}

/// Series route to A_p; the independent oracle for [`a_p_closed`].
pub fn a_p_series(omega_p: f64, omega: f64, t: f64, tail_tol: f64) -> Result<AmplitudeA> {
    check_time(t)?;
    if tail_tol.is_nan() || tail_tol <= 0.0 {
        return Err(Error::invalid("tail_tol", "must be > 0"));
    }
    let mode = mode_parameters(omega, omega_p, OmegaPolicy::Strict)?;
    Ok(AmplitudeA { value: amplitude_series(&mode, t, tail_tol), p: None, t })
}

/// Truncation and policy diagnostics of a [`Spring`].
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub support_len: usize,
    pub residual_mass: f64,
    pub cap_hit: bool,
    pub squeeze_support_len: usize,
    pub squeeze_tail_estimate: f64,
    pub warnings: Vec<String>,
}

/// A configured spring: the Poisson support and the modulation values on it,
/// precomputed once and shared by every time point.
#[derive(Debug, Clone)]
pub struct Spring {
    config: SpringConfig,
    profile: ModulationProfile,
    support: PoissonWeights,
    omegas: Vec<f64>,
    pub(crate) squeeze: SqueezeSupport,
}

impl Spring {
    pub fn new(config: SpringConfig, profile: ModulationProfile) -> Result<Self> {
        config.validate()?;
        let support = poisson_weights(config.nbar, config.eps_trunc, config.p_max_cap)?;
        let omegas = (0..support.len()).map(|p| profile.omega(p)).collect::<Result<Vec<_>>>()?;
        let squeeze = SqueezeSupport::build(&config, &profile, &support, &omegas);
        Ok(Spring { config, profile, support, omegas, squeeze })
    }

    pub fn config(&self) -> &SpringConfig {
        &self.config
    }

    pub fn profile(&self) -> &ModulationProfile {
        &self.profile
    }

    pub fn support(&self) -> &PoissonWeights {
        &self.support
    }

    /// Omega(p) over the Poisson support.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Policy-resolved mode at support index `p`.
    pub fn mode(&self, p: usize) -> Result<ModeParameters> {
        let omega_p = *self.omegas.get(p).ok_or(Error::OutOfRange { index: p, max: self.support.last_p() })?;
        mode_parameters(self.config.omega, omega_p, self.config.omega_policy).map_err(|e| e.at(p))
    }

    pub fn amplitude(&self, p: usize, t: f64) -> Result<AmplitudeA> {
        check_time(t)?;
        let mode = self.mode(p)?;
        Ok(AmplitudeA { value: amplitude_closed(&mode, t), p: Some(p), t })
    }

    /// Checks that every occupation on the support yields a usable mode,
    /// reporting the lowest offending p.
    pub fn check_modes(&self) -> Result<()> {
        for p in 0..self.omegas.len() {
            self.mode(p)?;
        }
        Ok(())
    }

    /// P0(t) = sum_p Q(p) |A_p(t)|^2, summed in ascending p.
    pub fn p0(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let mut total = 0.0;
        for (p, q) in self.support.iter() {
            let mode = self.mode(p)?;
            if q == 0.0 {
                continue;
            }
            total += q * amplitude_closed(&mode, t).norm_sqr();
        }
        Ok(total)
    }

    /// Mode of a classical source at occupation |alpha|^2.
    pub fn classical_mode(&self) -> Result<ModeParameters> {
        let omega_alpha = self.profile.omega_real(self.config.nbar)?;
        mode_parameters(self.config.omega, omega_alpha, self.config.omega_policy)
    }

    /// Classical-source limit: |A_p|^2 with p replaced by nbar, i.e.
    /// `beta^4 / (Omega sqrt(1 - 2 z cos(2 omega_alpha t) + z^2))`,
    /// `z = (beta^2 - 1)^2`. Periodic with period pi / omega_alpha.
    pub fn p_cl(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let mode = self.classical_mode()?;
        let z = mode.beta_sq_minus_one().powi(2);
        let one_minus_z = 4.0 * mode.omega_p / (1.0 + mode.omega_p).powi(2);
        // 1 - 2 z cos(2 w t) + z^2 = (1 - z)^2 + 4 z sin^2(w t)
        let s = (mode.frequency() * t).sin();
        let modulus = (one_minus_z * one_minus_z + 4.0 * z * s * s).sqrt();
        Ok(mode.beta_sq * mode.beta_sq / (mode.omega_p * modulus))
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let mut warnings = Vec::new();
        if self.support.cap_hit {
            warnings.push(format!(
                "poisson support capped at p = {} with residual mass {:e}",
                self.support.cap, self.support.residual
            ));
        }
        if self.config.omega_policy == OmegaPolicy::Absolute {
            for (p, &omega_p) in self.omegas.iter().enumerate() {
                if omega_p < 0.0 {
                    warnings.push(format!("Omega({p}) = {omega_p} replaced by its absolute value"));
                }
            }
        }
        if let Some(note) = &self.squeeze.note {
            warnings.push(note.clone());
        }
        Diagnostics {
            support_len: self.support.len(),
            residual_mass: self.support.residual,
            cap_hit: self.support.cap_hit,
            squeeze_support_len: self.squeeze.len(),
            squeeze_tail_estimate: self.squeeze.tail_estimate,
            warnings,
        }
    }
}

pub fn p0(config: &SpringConfig, profile: &ModulationProfile, t: f64) -> Result<f64> {
    Spring::new(*config, profile.clone())?.p0(t)
}

pub fn p_cl(config: &SpringConfig, profile: &ModulationProfile, t: f64) -> Result<f64> {
    Spring::new(*config, profile.clone())?.p_cl(t)
}
