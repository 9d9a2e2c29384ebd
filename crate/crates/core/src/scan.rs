//! Time-grid scans of P0, P_cl, S_x and S_p over tau = omega t / (2 pi).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{Diagnostics, Spring};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    P0,
    Pcl,
    Sx,
    Sp,
}

impl Quantity {
    /// Canonical column order.
    pub const ALL: [Quantity; 4] = [Quantity::P0, Quantity::Pcl, Quantity::Sx, Quantity::Sp];

    pub fn column(self) -> &'static str {
        match self {
            Quantity::P0 => "p0",
            Quantity::Pcl => "pcl",
            Quantity::Sx => "sx",
            Quantity::Sp => "sp",
        }
    }

    /// Parses a comma-separated list, returning the quantities in canonical
    /// order with duplicates removed.
    pub fn parse_list(s: &str) -> Result<Vec<Quantity>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            out.push(item.parse()?);
        }
        if out.is_empty() {
            return Err(Error::invalid("quantities", "no quantity requested"));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p0" => Ok(Quantity::P0),
            "pcl" => Ok(Quantity::Pcl),
            "sx" => Ok(Quantity::Sx),
            "sp" => Ok(Quantity::Sp),
            other => Err(Error::invalid("quantities", format!("unknown quantity {other:?}"))),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

/// Uniform grid of `steps` points from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl TauGrid {
    pub fn new(start: f64, end: f64, steps: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::invalid("tau", "endpoints must be finite"));
        }
        if start < 0.0 {
            return Err(Error::invalid("tau_start", format!("must be >= 0, got {start}")));
        }
        if start >= end {
            return Err(Error::invalid("tau_end", format!("must exceed tau_start ({start}), got {end}")));
        }
        if steps < 2 {
            return Err(Error::invalid("steps", format!("must be >= 2, got {steps}")));
        }
        Ok(TauGrid { start, end, steps })
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.end;
        }
        self.start + (self.end - self.start) * i as f64 / (self.steps - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.point(i)).collect()
    }
}

/// Grid with aligned columns plus truncation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub tau: Vec<f64>,
    pub quantities: Vec<Quantity>,
    /// `columns[k]` holds `quantities[k]` at every grid point.
    pub columns: Vec<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

impl ScanResult {
    pub fn column(&self, q: Quantity) -> Option<&[f64]> {
        self.quantities.iter().position(|&x| x == q).map(|k| self.columns[k].as_slice())
    }
}

fn evaluate(spring: &Spring, quantities: &[Quantity], t: f64) -> Result<Vec<f64>> {
    let mut row = Vec::with_capacity(quantities.len());
    let mut squeezing = None;
    for &q in quantities {
        let value = match q {
            Quantity::P0 => spring.p0(t)?,
            Quantity::Pcl => spring.p_cl(t)?,
            Quantity::Sx | Quantity::Sp => {
                let point = match squeezing {
                    Some(pt) => pt,
                    None => *squeezing.insert(spring.squeezing(t)?),
                };
                if q == Quantity::Sx {
                    point.s_x
                } else {
                    point.s_p
                }
            }
        };
        row.push(value);
    }
    Ok(row)
}

/// Evaluates `quantities` on every grid point. Points are computed in
/// parallel; each point's sums run in a fixed order, so the result does not
/// depend on scheduling.
pub fn scan(spring: &Spring, grid: &TauGrid, quantities: &[Quantity]) -> Result<ScanResult> {
    let mut quantities = quantities.to_vec();
    quantities.sort();
    quantities.dedup();
    if quantities.is_empty() {
        return Err(Error::invalid("quantities", "no quantity requested"));
    }
    if quantities.contains(&Quantity::P0) {
        spring.check_modes()?;
    }
    let tau = grid.points();
    let config = spring.config();
    // first point serially so configuration errors surface deterministically
    let first = evaluate(spring, &quantities, config.time_from_tau(tau[0]))?;
    let rest = tau[1..]
        .par_iter()
        .map(|&x| evaluate(spring, &quantities, config.time_from_tau(x)))
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![Vec::with_capacity(tau.len()); quantities.len()];
    for row in std::iter::once(first).chain(rest) {
        for (col, v) in columns.iter_mut().zip(row) {
            col.push(v);
        }
    }
    Ok(ScanResult { tau, quantities, columns, diagnostics: spring.diagnostics() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SpringConfig;
    use crate::nonlinearity::{ModulationProfile, NonlinearityFamily};

    #[test]
    fn grid_is_inclusive_and_uniform() {
        let g = TauGrid::new(0.0, 2.0, 5).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let g = TauGrid::new(0.1, 0.7, 7).unwrap();
        assert_eq!(*g.points().last().unwrap(), 0.7);
        assert!(TauGrid::new(1.0, 1.0, 5).is_err());
        assert!(TauGrid::new(0.0, 1.0, 1).is_err());
        assert!(TauGrid::new(-1.0, 1.0, 3).is_err());
    }

    #[test]
    fn quantity_list_is_canonical() {
        assert_eq!(Quantity::parse_list("sp,p0,sx,p0").unwrap(), vec![Quantity::P0, Quantity::Sx, Quantity::Sp]);
        assert!(Quantity::parse_list("p0,foo").is_err());
        assert!(Quantity::parse_list("").is_err());
    }

    #[test]
    fn identity_scan_is_flat() {
        let spring = Spring::new(SpringConfig::new(4.0), ModulationProfile::identity()).unwrap();
        let grid = TauGrid::new(0.0, 10.0, 101).unwrap();
        let r = scan(&spring, &grid, &Quantity::ALL).unwrap();
        for col in &r.columns {
            assert!(col.iter().all(|v| (v - 1.0).abs() <= 1e-12));
        }
    }

    #[test]
    fn scan_matches_pointwise_evaluation() {
        let profile = ModulationProfile::new(NonlinearityFamily::RaiAgarwal { mu: 0.5 }).unwrap();
        let spring = Spring::new(SpringConfig::new(3.0).with_omega(1.7), profile).unwrap();
        let grid = TauGrid::new(0.0, 3.0, 64).unwrap();
        let r = scan(&spring, &grid, &[Quantity::Sp, Quantity::P0]).unwrap();
        assert_eq!(r.quantities, vec![Quantity::P0, Quantity::Sp]);
        for (i, &tau) in r.tau.iter().enumerate() {
            let t = spring.config().time_from_tau(tau);
            assert_eq!(r.column(Quantity::P0).unwrap()[i].to_bits(), spring.p0(t).unwrap().to_bits());
            assert_eq!(r.column(Quantity::Sp).unwrap()[i].to_bits(), spring.s_p(t).unwrap().to_bits());
        }
    }

    #[test]
    fn scan_surfaces_omega_error() {
        let profile = ModulationProfile::new(NonlinearityFamily::PhotonAdded { m: 2 }).unwrap();
        let spring = Spring::new(SpringConfig::new(1.0), profile).unwrap();
        let grid = TauGrid::new(0.0, 1.0, 10).unwrap();
        let err = scan(&spring, &grid, &[Quantity::P0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveOmega { p: Some(0), .. }));
    }
}
