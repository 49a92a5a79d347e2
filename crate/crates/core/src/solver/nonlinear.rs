//! Convective term and the Picard iteration.

use super::linear::{LinearSolution, LinearSolver};
use crate::config::FlowConfig;
use crate::error::{Error, Result};
use crate::function_spaces::{AxiVectorField, SpectralMeasure};
use num_complex::Complex64;
use serde::Serialize;

fn d_dr(mu: &SpectralMeasure) -> Result<SpectralMeasure> {
    mu.map_modes(|_, _, p| Ok(p.d_dr()))
}

fn div_r(mu: &SpectralMeasure) -> Result<SpectralMeasure> {
    mu.map_modes(|_, _, p| Ok(p.div_r_pow(1.0)))
}

/// `−(v·∇)v + ((v^θ)²/r, −v^r v^θ/r, 0)`, with `∂_r v` from difference
/// stencils.
pub fn nonlinear_force(v: &AxiVectorField) -> Result<AxiVectorField> {
    let [r, t, z] = v.components();
    let dv = AxiVectorField::new(d_dr(r)?, d_dr(t)?, d_dr(z)?);
    nonlinear_force_with(v, &dv)
}

/// As [`nonlinear_force`] with a supplied `∂_r v`.
pub fn nonlinear_force_with(v: &AxiVectorField, dv: &AxiVectorField) -> Result<AxiVectorField> {
    let [vr, vt, vz] = v.components();
    let [dr_vr, dr_vt, dr_vz] = dv.components();
    let advect = |dr: &SpectralMeasure, f: &SpectralMeasure| -> Result<SpectralMeasure> {
        vr.convolve(dr)?.add(&vz.convolve(&f.z_derivative())?)
    };
    let minus = Complex64::new(-1.0, 0.0);
    let n_r = div_r(&vt.convolve(vt)?)?.sub(&advect(dr_vr, vr)?)?;
    let n_t = advect(dr_vt, vt)?.add(&div_r(&vr.convolve(vt)?)?)?.scale(minus);
    let n_z = advect(dr_vz, vz)?.scale(minus);
    Ok(AxiVectorField::new(n_r.prune(), n_t.prune(), n_z.prune()))
}

/// Result of the fixed-point iteration.
#[derive(Debug, Clone)]
pub struct NonlinearSolution {
    pub v: AxiVectorField,
    pub dv: AxiVectorField,
    /// `‖v_{n+1} − v_n‖_{FX(L∞_{ρ−1})}` per iteration.
    pub history: Vec<f64>,
    pub converged: bool,
    /// Largest norm of the atoms dropped by the `|m| ≤ M_max` truncation.
    pub truncation_norm: f64,
    pub warnings: Vec<String>,
}

impl NonlinearSolution {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    /// Successive ratios of the deltas.
    pub fn delta_ratios(&self) -> Vec<f64> {
        self.history.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect()
    }
}

/// Summary of a Picard run for reports.
#[derive(Debug, Clone, Serialize)]
pub struct PicardSummary {
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
    pub delta_ratios: Vec<f64>,
    pub truncation_norm: f64,
}

impl From<&NonlinearSolution> for PicardSummary {
    fn from(s: &NonlinearSolution) -> Self {
        Self {
            iterations: s.iterations(),
            converged: s.converged,
            history: s.history.clone(),
            delta_ratios: s.delta_ratios(),
            truncation_norm: s.truncation_norm,
        }
    }
}

fn truncate(f: &AxiVectorField, m_max: i64, rho: f64) -> (AxiVectorField, f64) {
    let [r, t, z] = f.components();
    let (r, a) = r.truncate_atoms(m_max, rho);
    let (t, b) = t.truncate_atoms(m_max, rho);
    let (z, c) = z.truncate_atoms(m_max, rho);
    (AxiVectorField::new(r, t, z), a + b + c)
}

/// `v_{n+1} = v_n + relax·(S(f + N(v_n)) − v_n)` from `v_0 = 0`, with `S` the
/// linear solution operator.
pub fn picard_solve_with(solver: &LinearSolver, f: &AxiVectorField, cfg: &FlowConfig) -> Result<NonlinearSolution> {
    cfg.validate()?;
    let rho = cfg.rho;
    let pc = &cfg.picard;
    let mut warnings = Vec::new();
    let f_norm = f.fx_norm(rho + 1.0);
    if f_norm > pc.smallness {
        warnings.push(format!(
            "force norm {f_norm:e} exceeds the smallness threshold {:e}; convergence is not guaranteed",
            pc.smallness
        ));
    }
    if !cfg.alpha_is_small() {
        warnings.push(format!("|alpha| = {} is outside the small-rotation regime", cfg.alpha.abs()));
    }
    let zero = AxiVectorField::zero(f.grid().clone());
    let mut v = zero.clone();
    let mut dv = zero;
    let mut history = Vec::new();
    let mut truncation_norm: f64 = 0.0;
    for _ in 0..pc.max_iter {
        let rhs = if v.is_zero() {
            f.clone()
        } else {
            let (n, dropped) = truncate(&nonlinear_force_with(&v, &dv)?, cfg.grid.atom_cutoff, 2.0 * rho - 1.0);
            truncation_norm = truncation_norm.max(dropped);
            f.add(&n)?
        };
        let LinearSolution { v: w, dv: dw, .. } = solver.solve(&rhs)?;
        let step = w.sub(&v)?;
        let dstep = dw.sub(&dv)?;
        let relax = Complex64::new(pc.relax, 0.0);
        v = v.add(&step.scale(relax))?;
        dv = dv.add(&dstep.scale(relax))?;
        let delta = step.fx_norm(rho - 1.0) * pc.relax;
        history.push(delta);
        if !delta.is_finite() || delta > 1e6 * (1.0 + f_norm) {
            break;
        }
        if delta <= pc.tol_fx {
            return Ok(NonlinearSolution { v, dv, history, converged: true, truncation_norm, warnings });
        }
    }
    Err(Error::NonConvergence {
        iterations: history.len(),
        last_delta: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

/// Picard iteration with a fresh solver built from `cfg`.
pub fn picard_solve(f: &AxiVectorField, cfg: &FlowConfig) -> Result<NonlinearSolution> {
    cfg.validate()?;
    let solver = LinearSolver::new(cfg.gamma, cfg.alpha, f.grid().clone())?;
    picard_solve_with(&solver, f, cfg)
}
