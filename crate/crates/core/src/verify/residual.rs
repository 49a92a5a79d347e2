//! Physical-space residuals of the momentum equations and the divergence.
//!
//! Radial derivatives come from fourth-order stencils on each mode profile,
//! `∂_z` from the exact multiplier `iζ`; the residual measures are then
//! reconstructed on a probe grid.

use crate::config::FlowConfig;
use crate::error::{Error, Result};
use crate::function_spaces::{AxiVectorField, ModeKey, RadialProfile, SpectralMeasure};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Tensor grid of `(r, z)` probe points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeGrid {
    pub r: Vec<f64>,
    pub z: Vec<f64>,
}

impl ProbeGrid {
    /// `count_r` log-spaced radii on `[r_lo, r_hi]` × `count_z` uniform heights
    /// on `[0, 2π)`.
    pub fn new(r_lo: f64, r_hi: f64, count_r: usize, count_z: usize) -> Result<Self> {
        if !(r_lo >= 1.0 && r_hi > r_lo) || count_r < 2 || count_z == 0 {
            return Err(Error::OutOfGrid(format!("invalid probe window [{r_lo}, {r_hi}]")));
        }
        let r = (0..count_r)
            .map(|i| r_lo * (r_hi / r_lo).powf(i as f64 / (count_r - 1) as f64))
            .collect();
        let z = (0..count_z).map(|j| std::f64::consts::TAU * j as f64 / count_z as f64).collect();
        Ok(Self { r, z })
    }
}

impl Default for ProbeGrid {
    fn default() -> Self {
        Self::new(1.05, 50.0, 48, 64).expect("default probe grid")
    }
}

/// Residual measures of a velocity field against a force.
#[derive(Debug, Clone)]
pub struct Residuals {
    pub r: SpectralMeasure,
    pub theta: SpectralMeasure,
    pub z: SpectralMeasure,
    pub divergence: SpectralMeasure,
    /// `∂_z R^r − ∂_r R^z`, which vanishes when `(R^r, R^z)` is a gradient.
    pub rot: SpectralMeasure,
}

fn pick(mu: &SpectralMeasure, key: ModeKey) -> RadialProfile {
    mu.profile(key).cloned().unwrap_or_else(|| RadialProfile::zeros(mu.grid().clone()))
}

fn scalar_laplacian(v: &RadialProfile, zeta: f64) -> Result<RadialProfile> {
    v.d2_dr2().add(&v.d_dr().div_r_pow(1.0))?.sub(&v.scale_real(zeta * zeta))
}

/// Pointwise residuals of the linearized equations (with rotation `α`) for
/// velocity `v` and total force `f`; the pressure is left out of `R^r`, `R^z`.
pub fn residual_measures(v: &AxiVectorField, f: &AxiVectorField, gamma: f64, alpha: f64) -> Result<Residuals> {
    let [vr, vt, vz] = v.components();
    let [fr, ft, fz] = f.components();
    let mut keys = Vec::new();
    for mu in [vr, vt, vz, fr, ft, fz] {
        keys.extend(mu.modes());
    }
    keys.sort();
    keys.dedup();
    let zeta_grid = [vr, vt, vz, fr, ft, fz].iter().find_map(|m| m.zeta_grid().cloned());
    let per_mode = keys
        .par_iter()
        .map(|&key| -> Result<(ModeKey, [RadialProfile; 5])> {
            let zeta = match key {
                ModeKey::Atom(m) => m as f64,
                ModeKey::Density(j) => zeta_grid.as_ref().expect("zeta grid").nodes()[j],
            };
            let iz = Complex64::new(0.0, zeta);
            let (a, b, c) = (pick(vr, key), pick(vt, key), pick(vz, key));
            let (ga, gb, gc) = (pick(fr, key), pick(ft, key), pick(fz, key));
            let rr = scalar_laplacian(&a, zeta)?.sub(&a.div_r_pow(2.0))?.scale_real(-1.0);
            let rr = rr.sub(&b.div_r_pow(-1.0).d_dr().div_r_pow(2.0).scale_real(alpha))?.sub(&ga)?;
            let rt = scalar_laplacian(&b, zeta)?
                .add(&b.d_dr().div_r_pow(1.0).scale_real(gamma))?
                .sub(&b.div_r_pow(2.0).scale_real(1.0 - gamma))?
                .scale_real(-1.0)
                .sub(&gb)?;
            let rz = scalar_laplacian(&c, zeta)?
                .scale_real(-1.0)
                .add(&a.scale(iz).sub(&c.d_dr())?.div_r_pow(1.0).scale_real(gamma))?
                .sub(&b.div_r_pow(1.0).scale(iz * alpha))?
                .sub(&gc)?;
            let div = a.d_dr().add(&a.div_r_pow(1.0))?.add(&c.scale(iz))?;
            let rot = rr.scale(iz).sub(&rz.d_dr())?;
            Ok((key, [rr, rt, rz, div, rot]))
        })
        .collect::<Result<Vec<_>>>()?;
    let build = |idx: usize| -> Result<SpectralMeasure> {
        let mut atoms = std::collections::BTreeMap::new();
        let mut density = Vec::new();
        for (key, profs) in &per_mode {
            match key {
                ModeKey::Atom(m) => {
                    atoms.insert(*m, profs[idx].clone());
                }
                ModeKey::Density(_) => density.push(profs[idx].clone()),
            }
        }
        SpectralMeasure::from_parts(v.grid().clone(), zeta_grid.clone(), density, atoms)
    };
    Ok(Residuals { r: build(0)?, theta: build(1)?, z: build(2)?, divergence: build(3)?, rot: build(4)? })
}

/// `max |μ(r, z)|` over the probe grid.
pub fn probe_max(mu: &SpectralMeasure, probe: &ProbeGrid) -> Result<f64> {
    let rows = probe
        .r
        .par_iter()
        .map(|&r| -> Result<f64> {
            let mut m: f64 = 0.0;
            for &z in &probe.z {
                m = m.max(mu.reconstruct(r, z)?.norm());
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().fold(0.0, f64::max))
}

/// `r,z,value` rows of the real part of a reconstructed field.
pub fn probe_csv(mu: &SpectralMeasure, probe: &ProbeGrid) -> Result<String> {
    use crate::function_spaces::io::fmt_num;
    let mut out = String::from("r,z,value\n");
    for &r in &probe.r {
        for &z in &probe.z {
            let v = mu.reconstruct(r, z)?;
            out.push_str(&format!("{},{},{}\n", fmt_num(r), fmt_num(z), fmt_num(v.re)));
        }
    }
    Ok(out)
}

/// Largest velocity magnitude at `r = 1` over all modes.
pub fn boundary_defect(v: &AxiVectorField) -> f64 {
    v.components()
        .iter()
        .flat_map(|mu| mu.atoms().values().chain(mu.density().iter()))
        .map(|p| p.values()[0].norm())
        .fold(0.0, f64::max)
}

/// Residual maxima on the probe grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualNorms {
    pub momentum_r: f64,
    pub momentum_theta: f64,
    pub momentum_z: f64,
    pub divergence: f64,
    pub rot: f64,
    pub boundary: f64,
}

pub fn residual_norms(v: &AxiVectorField, f: &AxiVectorField, cfg: &FlowConfig, probe: &ProbeGrid) -> Result<ResidualNorms> {
    let res = residual_measures(v, f, cfg.gamma, cfg.alpha)?;
    Ok(ResidualNorms {
        momentum_r: probe_max(&res.r, probe)?,
        momentum_theta: probe_max(&res.theta, probe)?,
        momentum_z: probe_max(&res.z, probe)?,
        divergence: probe_max(&res.divergence, probe)?,
        rot: probe_max(&res.rot, probe)?,
        boundary: boundary_defect(v),
    })
}
