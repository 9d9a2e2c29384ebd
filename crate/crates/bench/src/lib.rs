//! Standard workloads shared by the benchmarks.

use nlspring::{ModulationProfile, NonlinearityFamily, Spring, SpringConfig, TauGrid};

/// Builds a spring with default numerics for `family` at mean photon number `nbar`.
pub fn spring(family: NonlinearityFamily, nbar: f64) -> Spring {
    let profile = ModulationProfile::new(family).expect("benchmark family is valid");
    Spring::new(SpringConfig::new(nbar), profile).expect("benchmark spring is valid")
}

/// The q-deformed collapse/revival configuration (lambda = 0.1, nbar = 9).
pub fn q_deformed_nbar9() -> Spring {
    spring(NonlinearityFamily::QDeformed { lambda: 0.1 }, 9.0)
}

/// `steps` points over tau in [0, end].
pub fn grid(end: f64, steps: usize) -> TauGrid {
    TauGrid::new(0.0, end, steps).expect("benchmark grid is valid")
}
