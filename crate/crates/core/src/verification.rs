//! Brute-force oracles: overlaps by direct quadrature and P0 by series
//! re-summation. Kept independent of the closed forms they check.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::Value;

use crate::dynamics::{amplitude_series, Spring, SpringConfig};
use crate::eigensystem::{mode_parameters, wavefunction, ModeParameters, OmegaPolicy};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::nonlinearity::ModulationProfile;

/// Largest eigenstate index accepted by the quadrature oracle.
pub const MAX_QUADRATURE_INDEX: usize = 200;

const SERIES_TAIL_TOL: f64 = 1e-16;

/// Composite trapezoid rule on `[-L / a, L / a]`, where `a` is the smaller
/// of the two inverse length scales (the wider state sets the window).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Window half-width in units of the wider state's length scale.
    pub half_width: f64,
    /// Number of nodes, endpoints included.
    pub nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { half_width: 12.0, nodes: 4096 }
    }
}

/// (integral of psi_l^Omega(x) phi_0(x) dx)^2 by trapezoid quadrature.
pub fn overlap_sq_quadrature(mode: &ModeParameters, l: usize, spec: &QuadratureSpec) -> Result<f64> {
    if l > MAX_QUADRATURE_INDEX {
        return Err(Error::OutOfRange { index: l, max: MAX_QUADRATURE_INDEX });
    }
    if spec.half_width.is_nan() || spec.half_width <= 0.0 || spec.nodes < 2 {
        return Err(Error::invalid("quadrature", "need half_width > 0 and at least 2 nodes"));
    }
    let ground = mode_parameters(mode.omega, 1.0, OmegaPolicy::Strict)?;
    let scale = mode.alpha_p().min(ground.alpha_p());
    let half = spec.half_width / scale;
    let h = 2.0 * half / (spec.nodes - 1) as f64;
    let mut sum = 0.0;
    for i in 0..spec.nodes {
        let x = -half + i as f64 * h;
        let weight = if i == 0 || i == spec.nodes - 1 { 0.5 } else { 1.0 };
        sum += weight * wavefunction(mode, l, x) * wavefunction(&ground, 0, x);
    }
    let overlap = sum * h;
    Ok(overlap * overlap)
}

/// P0(t) recomputed from the series form of A_p instead of the closed form.
pub fn p0_oracle(config: &SpringConfig, profile: &ModulationProfile, t: f64) -> Result<f64> {
    let spring = Spring::new(*config, profile.clone())?;
    p0_oracle_on(&spring, t)
}

/// As [`p0_oracle`], reusing an existing spring's support.
pub fn p0_oracle_on(spring: &Spring, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    let mut total = 0.0;
    for (p, q) in spring.support().iter() {
        let mode = spring.mode(p)?;
        if q == 0.0 {
            continue;
        }
        total += q * amplitude_series(&mode, t, SERIES_TAIL_TOL).norm_sqr();
    }
    Ok(total)
}

/// One line of a regression fixture file (JSON lines).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub family: String,
    pub params: Value,
    #[serde(serialize_with = "ser_sig17")]
    pub nbar: f64,
    #[serde(serialize_with = "ser_sig17")]
    pub omega: f64,
    #[serde(serialize_with = "ser_sig17")]
    pub tau: f64,
    #[serde(serialize_with = "ser_sig17")]
    pub p0: f64,
    #[serde(serialize_with = "ser_sig17")]
    pub s_x: f64,
    #[serde(serialize_with = "ser_sig17")]
    pub s_p: f64,
}

fn ser_sig17<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return serializer.serialize_none();
    }
    let raw = RawValue::from_string(sig17(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(serializer)
}

impl FixtureRecord {
    /// Evaluates a record with the oracle P0 and the squeezing sums.
    pub fn evaluate(spring: &Spring, tau: f64) -> Result<Self> {
        let config = spring.config();
        let t = config.time_from_tau(tau);
        let family = spring.profile().family();
        let point = spring.squeezing(t)?;
        Ok(FixtureRecord {
            family: family.label().to_string(),
            params: family.params_json(),
            nbar: config.nbar,
            omega: config.omega,
            tau,
            p0: p0_oracle_on(spring, t)?,
            s_x: point.s_x,
            s_p: point.s_p,
        })
    }
}

pub fn write_fixture<W: Write>(mut out: W, records: &[FixtureRecord]) -> std::io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_fixture<R: BufRead>(input: R) -> std::io::Result<Vec<FixtureRecord>> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}
