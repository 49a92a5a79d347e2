//! Text dumps: profiles as CSV `r,re,im`, measures as a JSON manifest.

use super::{RadialProfile, SpectralMeasure};
use serde::Serialize;
use std::fmt::Write as _;

/// Formats a float with 17 significant digits and a lowercase exponent.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn profile_csv(p: &RadialProfile) -> String {
    let mut out = String::from("r,re,im\n");
    for (r, v) in p.grid().nodes().iter().zip(p.values()) {
        let _ = writeln!(out, "{},{},{}", fmt_num(*r), fmt_num(v.re), fmt_num(v.im));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct MeasureManifest {
    pub radial_nodes: usize,
    pub r_max: f64,
    pub atoms: Vec<AtomEntry>,
    pub zeta_nodes: Vec<f64>,
    pub zeta_weights: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct AtomEntry {
    pub m: i64,
    pub tail_exponent: f64,
    pub max_abs: f64,
}

pub fn measure_manifest(mu: &SpectralMeasure) -> MeasureManifest {
    MeasureManifest {
        radial_nodes: mu.grid().len(),
        r_max: mu.grid().r_max(),
        atoms: mu
            .atoms()
            .iter()
            .map(|(&m, p)| AtomEntry { m, tail_exponent: p.tail_exponent(), max_abs: p.max_abs() })
            .collect(),
        zeta_nodes: mu.zeta_grid().map(|z| z.nodes().to_vec()).unwrap_or_default(),
        zeta_weights: mu.zeta_grid().map(|z| z.weights().to_vec()).unwrap_or_default(),
    }
}

pub fn measure_manifest_json(mu: &SpectralMeasure) -> String {
    serde_json::to_string_pretty(&measure_manifest(mu)).expect("manifest serializes")
}
