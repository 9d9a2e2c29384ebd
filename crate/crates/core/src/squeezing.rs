//! Quadrature squeezing parameters
//!
//! ```text
//! S_x(t) = 1 - sum_n Q(n) sin^2(omega Omega(n) t) (1 - 1/Omega^2(n))
//! S_p(t) = 1 + sum_n Q(n) sin^2(omega Omega(n) t) (Omega^2(n) - 1)
//! ```
//!
//! Values below 1 signal squeezing in that quadrature. Each summand of
//! `S_x - 1` and `S_p - 1` has the opposite sign, so the two are never
//! squeezed at the same instant.

use crate::dynamics::{PoissonTerms, PoissonWeights, Spring, SpringConfig};
use crate::error::{Error, Result};
use crate::nonlinearity::ModulationProfile;

/// S_x and S_p at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingPoint {
    pub t: f64,
    pub s_x: f64,
    pub s_p: f64,
}

/// Support used by the squeezing sums. The summands carry Omega^2 (or
/// 1/Omega^2), which can outgrow the Poisson decay for a while, so the
/// support runs past the Poisson-mass cutoff until the weighted tail
/// `sum Q(n) max(1, Omega^2, 1/Omega^2)` is estimated below `eps_trunc`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SqueezeSupport {
    pub(crate) weights: Vec<f64>,
    pub(crate) omegas: Vec<f64>,
    /// Ratio-test estimate of the omitted weighted tail.
    pub(crate) tail_estimate: f64,
    pub(crate) note: Option<String>,
}

fn tail_weight(omega_n: f64) -> f64 {
    if omega_n == 0.0 {
        return 1.0;
    }
    let sq = omega_n * omega_n;
    sq.max(1.0 / sq).max(1.0)
}

impl SqueezeSupport {
    pub(crate) fn build(
        config: &SpringConfig,
        profile: &ModulationProfile,
        support: &PoissonWeights,
        omegas: &[f64],
    ) -> Self {
        let mut weights = support.weights.clone();
        let mut omegas = omegas.to_vec();
        let mut last = support.last_p();
        let mut last_term = weights[last] * tail_weight(omegas[last]);
        let mut terms = PoissonTerms::resume(config.nbar, last);
        let mut tail_estimate;
        let mut note = None;
        loop {
            if last >= config.p_max_cap {
                tail_estimate = f64::INFINITY;
                note = Some(format!("squeezing support capped at p = {}", config.p_max_cap));
                break;
            }
            let (n, q) = terms.next().expect("poisson sequence is unbounded");
            if q == 0.0 {
                tail_estimate = 0.0;
                break;
            }
            let omega_n = match profile.omega(n) {
                Ok(v) => v,
                Err(_) => {
                    tail_estimate = f64::INFINITY;
                    note = Some(format!("squeezing support stops at the end of the spectrum (p = {last})"));
                    break;
                }
            };
            let term = q * tail_weight(omega_n);
            let ratio = if last_term > 0.0 { term / last_term } else { f64::INFINITY };
            tail_estimate = if ratio < 1.0 { term / (1.0 - ratio) } else { f64::INFINITY };
            if tail_estimate < config.eps_trunc {
                break;
            }
            weights.push(q);
            omegas.push(omega_n);
            last = n;
            last_term = term;
        }
        SqueezeSupport { weights, omegas, tail_estimate, note }
    }

    pub(crate) fn len(&self) -> usize {
        self.weights.len()
    }

    fn check_nonzero(&self) -> Result<()> {
        match self.omegas.iter().position(|&o| o == 0.0) {
            Some(n) => Err(Error::ZeroOmega { p: Some(n) }),
            None => Ok(()),
        }
    }

    /// (S_x - 1, S_p - 1), summed in ascending n.
    fn deviations(&self, omega: f64, t: f64) -> Result<(f64, f64)> {
        self.check_nonzero()?;
        let mut dx = 0.0;
        let mut dp = 0.0;
        for (&q, &omega_n) in self.weights.iter().zip(&self.omegas) {
            if q == 0.0 {
                continue;
            }
            let s = (omega * omega_n * t).sin();
            let w = q * s * s;
            let sq = omega_n * omega_n;
            dx -= w * (1.0 - 1.0 / sq);
            dp += w * (sq - 1.0);
        }
        Ok((dx, dp))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")))
    }
}

impl Spring {
    pub fn s_x(&self, t: f64) -> Result<f64> {
        Ok(1.0 + self.squeezing_deviations(t)?.0)
    }

    pub fn s_p(&self, t: f64) -> Result<f64> {
        Ok(1.0 + self.squeezing_deviations(t)?.1)
    }

    pub fn squeezing(&self, t: f64) -> Result<SqueezingPoint> {
        let (dx, dp) = self.squeezing_deviations(t)?;
        Ok(SqueezingPoint { t, s_x: 1.0 + dx, s_p: 1.0 + dp })
    }

    fn squeezing_deviations(&self, t: f64) -> Result<(f64, f64)> {
        check_time(t)?;
        self.squeeze.deviations(self.config().omega, t)
    }
}

pub fn s_x(config: &SpringConfig, profile: &ModulationProfile, t: f64) -> Result<f64> {
    Spring::new(*config, profile.clone())?.s_x(t)
}

pub fn s_p(config: &SpringConfig, profile: &ModulationProfile, t: f64) -> Result<f64> {
    Spring::new(*config, profile.clone())?.s_p(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensystem::OmegaPolicy;
    use crate::nonlinearity::NonlinearityFamily;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn spring(nbar: f64, family: NonlinearityFamily) -> Spring {
        Spring::new(SpringConfig::new(nbar), ModulationProfile::new(family).unwrap()).unwrap()
    }

    #[test]
    fn initial_and_identity_values() {
        let q = spring(4.0, NonlinearityFamily::QDeformed { lambda: 0.2 });
        assert_eq!(q.s_x(0.0).unwrap(), 1.0);
        assert_eq!(q.s_p(0.0).unwrap(), 1.0);
        let id = spring(4.0, NonlinearityFamily::Identity);
        for t in [0.3, 2.0, 40.0] {
            assert_eq!(id.s_x(t).unwrap(), 1.0);
            assert_eq!(id.s_p(t).unwrap(), 1.0);
        }
    }

    #[test]
    fn single_term_examples() {
        // nbar = 0 leaves only n = 0; Omega(0) = e_1 - e_0
        let two = spring(0.0, NonlinearityFamily::CustomSpectrum { levels: vec![0.0, 2.0] });
        assert_abs_diff_eq!(two.s_x(PI / 4.0).unwrap(), 0.25, epsilon = 1e-15);

        let half = spring(0.0, NonlinearityFamily::CustomSpectrum { levels: vec![0.0, 0.5] });
        assert_abs_diff_eq!(half.s_p(PI).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn zero_omega_is_an_error() {
        let m2 = spring(1.0, NonlinearityFamily::PhotonAdded { m: 2 });
        assert!(matches!(m2.s_x(1.0), Err(Error::ZeroOmega { p: Some(0) })));
        assert!(matches!(m2.s_p(1.0), Err(Error::ZeroOmega { p: Some(0) })));
    }

    #[test]
    fn negative_omega_sign_is_invisible() {
        // m = 3 has Omega(1) = -0.25; squeezing only sees Omega^2
        let strict = spring(1.0, NonlinearityFamily::PhotonAdded { m: 3 });
        let abs = Spring::new(
            SpringConfig::new(1.0).with_policy(OmegaPolicy::Absolute),
            ModulationProfile::new(NonlinearityFamily::PhotonAdded { m: 3 }).unwrap(),
        )
        .unwrap();
        for t in [0.5, 1.7] {
            assert_eq!(strict.squeezing(t).unwrap(), abs.squeezing(t).unwrap());
        }
    }

    #[test]
    fn q_deformed_support_extends_past_poisson_cutoff() {
        let q = spring(9.0, NonlinearityFamily::QDeformed { lambda: 0.5 });
        let d = q.diagnostics();
        assert!(d.squeeze_support_len > d.support_len);
        assert!(d.squeeze_tail_estimate < 1e-12);
    }

    #[test]
    fn never_squeezed_in_both_quadratures() {
        for family in [
            NonlinearityFamily::PhotonAdded { m: 1 },
            NonlinearityFamily::PhotonAdded { m: -2 },
            NonlinearityFamily::QDeformed { lambda: 0.3 },
        ] {
            let s = spring(3.0, family);
            for i in 0..500 {
                let pt = s.squeezing(0.05 * i as f64).unwrap();
                assert!(!(pt.s_x < 1.0 && pt.s_p < 1.0), "{pt:?}");
                assert!(pt.s_x >= 0.0 && pt.s_p >= 0.0);
            }
        }
    }

    #[test]
    fn truncation_bound() {
        let family = NonlinearityFamily::RaiAgarwal { mu: 0.5 };
        let profile = ModulationProfile::new(family).unwrap();
        let a = Spring::new(SpringConfig::new(6.0).with_eps_trunc(1e-8), profile.clone()).unwrap();
        let b = Spring::new(SpringConfig::new(6.0).with_eps_trunc(1e-9), profile).unwrap();
        let bound = a.omegas().iter().map(|o| (1.0 - 1.0 / (o * o)).abs()).fold(0.0, f64::max);
        for i in 0..100 {
            let t = 0.21 * i as f64;
            assert!((a.s_x(t).unwrap() - b.s_x(t).unwrap()).abs() < 10.0 * 1e-8 * bound.max(1e-300));
        }
    }
}
