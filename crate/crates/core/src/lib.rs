//! Nonlinear quantum optical springs.
//!
//! A harmonic oscillator whose frequency is modulated by a quantised source
//! (QSM) through an intensity-dependent profile Omega(n), itself derived from
//! the nonlinearity function f(n) of a nonlinear coherent state family:
//!
//! ```text
//! Omega(n) = (n+1) f^2(n+1) - n f^2(n)
//! H        = p^2/2 + omega^2 Omega^2(n) x^2 / 2        (hbar = m = 1)
//! ```
//!
//! With the QSM in a coherent state of mean photon number `nbar` and the
//! oscillator in its ground state, the crate computes the return probability
//! P0(t), its classical-source limit P_cl(t), and the quadrature squeezing
//! parameters S_x(t), S_p(t). Independent oracles (quadrature overlaps,
//! series re-summation) live in [`verification`].
//!
//! ```
//! use nlspring::{ModulationProfile, NonlinearityFamily, Spring, SpringConfig};
//!
//! let profile = ModulationProfile::new(NonlinearityFamily::q_deformed(0.1)?)?;
//! let spring = Spring::new(SpringConfig::new(9.0), profile)?;
//! assert!((spring.p0(0.0)? - 1.0).abs() < 1e-10);
//! assert!(spring.s_x(1.3)? <= 1.0);
//! # Ok::<(), nlspring::Error>(())
//! ```

pub mod dynamics;
pub mod eigensystem;
pub mod error;
pub mod format;
pub mod nonlinearity;
pub mod scan;
pub mod squeezing;
pub mod verification;

pub use dynamics::{
    a_p_closed, a_p_series, p0, p_cl, poisson_weights, AmplitudeA, Diagnostics, PoissonWeights, Spring,
    SpringConfig, DEFAULT_EPS_TRUNC, DEFAULT_P_MAX_CAP,
};
pub use eigensystem::{
    energy, hermite, mode_parameters, overlap_sq_ground, wavefunction, GroundOverlaps, ModeParameters,
    OmegaPolicy,
};
pub use error::{Error, Result};
pub use nonlinearity::{spectrum_to_family, ModulationProfile, NonlinearityFamily};
pub use scan::{scan, Quantity, ScanResult, TauGrid};
pub use squeezing::{s_p, s_x, SqueezingPoint};
pub use verification::{overlap_sq_quadrature, p0_oracle, FixtureRecord, QuadratureSpec};
