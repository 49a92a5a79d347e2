//! Independent checks: finite-difference oracle, residuals, decay fits and
//! the linear-estimate ratio.

mod oracle;
mod residual;

pub use oracle::{
    default_robin, fd_noslip_vorticity, fd_oracle_mode, source_robin, NoSlipOracle, OracleProblem, OracleSolution,
};
pub use residual::{
    boundary_defect, probe_csv, probe_max, residual_measures, residual_norms, ProbeGrid, ResidualNorms, Residuals,
};

use crate::config::FlowConfig;
use crate::error::{Error, Result};
use crate::function_spaces::{AxiVectorField, ModeKey, RadialProfile};
use crate::solver::PicardSummary;
use serde::Serialize;

/// Least-squares decay exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub r2: f64,
}

/// Fit `|p(r)| ≈ C r^{-exponent}` on `[r_lo, r_hi]` by regression of `ln|p|`
/// on `ln r` over 64 log-spaced samples.
pub fn fit_decay_exponent(p: &RadialProfile, window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(lo >= 1.0 && hi > lo * (1.0 + 1e-9)) {
        return Err(Error::Domain(format!("degenerate fit window [{lo}, {hi}]")));
    }
    const SAMPLES: usize = 64;
    let mut xs = Vec::with_capacity(SAMPLES);
    let mut ys = Vec::with_capacity(SAMPLES);
    for i in 0..SAMPLES {
        let r = lo * (hi / lo).powf(i as f64 / (SAMPLES - 1) as f64);
        let v = p.eval_extended(r)?.norm();
        if !(v > 0.0) {
            return Err(Error::Domain(format!("degenerate fit window: profile vanishes at r = {r}")));
        }
        xs.push(r.ln());
        ys.push(v.ln());
    }
    let n = SAMPLES as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(DecayFit { exponent: -slope, r2 })
}

/// `‖v‖_{FX(L∞_{ρ−1})} / ‖f‖_{FX(L∞_{ρ+1})}`.
pub fn check_lp_estimate(v: &AxiVectorField, f: &AxiVectorField, rho: f64) -> Result<f64> {
    let fnorm = f.fx_norm(rho + 1.0);
    if fnorm == 0.0 {
        return Err(Error::Domain("linear-estimate ratio undefined for f = 0".into()));
    }
    Ok(v.fx_norm(rho - 1.0) / fnorm)
}

/// Decay fit of one component of one mode.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentDecay {
    pub component: &'static str,
    pub mode: ModeKey,
    pub fit: DecayFit,
}

/// Everything the verification layer reports about a solution.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub residuals: ResidualNorms,
    pub decay: Vec<ComponentDecay>,
    pub lp_ratio: Option<f64>,
    pub picard: Option<PicardSummary>,
    pub residual_tolerance: f64,
    pub boundary_tolerance: f64,
    pub residuals_pass: bool,
    pub boundary_pass: bool,
}

impl DiagnosticsReport {
    pub fn passed(&self) -> bool {
        self.residuals_pass && self.boundary_pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Fits on `[r_lo, r_hi]` for every nonzero atom profile of every component.
pub fn decay_fits(v: &AxiVectorField, window: (f64, f64)) -> Vec<ComponentDecay> {
    let names = ["v_r", "v_theta", "v_z"];
    let mut out = Vec::new();
    for (name, mu) in names.iter().zip(v.components()) {
        for (&m, p) in mu.atoms() {
            if let Ok(fit) = fit_decay_exponent(p, window) {
                out.push(ComponentDecay { component: name, mode: ModeKey::Atom(m), fit });
            }
        }
    }
    out
}

/// Residuals of `v` against the force `f` (already including any nonlinear
/// term), decay fits and the estimate ratio.
pub fn residual_report(
    v: &AxiVectorField,
    f: &AxiVectorField,
    cfg: &FlowConfig,
    probe: &ProbeGrid,
    picard: Option<PicardSummary>,
) -> Result<DiagnosticsReport> {
    let residuals = residual_norms(v, f, cfg, probe)?;
    let tol = cfg.tolerances.residual;
    let residuals_pass = [residuals.momentum_theta, residuals.divergence, residuals.rot]
        .iter()
        .all(|x| x.is_finite() && *x <= tol);
    let boundary_pass = residuals.boundary <= cfg.tolerances.boundary;
    let r_hi = v.grid().r_max();
    Ok(DiagnosticsReport {
        residuals,
        decay: decay_fits(v, (r_hi / 20.0, r_hi / 2.0)),
        lp_ratio: check_lp_estimate(v, f, cfg.rho).ok(),
        picard,
        residual_tolerance: tol,
        boundary_tolerance: cfg.tolerances.boundary,
        residuals_pass,
        boundary_pass,
    })
}
