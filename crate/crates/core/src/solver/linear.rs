//! The linearized problem for a full force field.

use super::modes::{ModeOperator, ModeSolution};
use crate::config::FlowConfig;
use crate::error::{Error, Result};
use crate::function_spaces::{AxiVectorField, ModeKey, RadialGrid, RadialProfile, SpectralMeasure, ZetaGrid};
use crate::greens::{GridQuadrature, ModeKind, ZETA_SWITCH};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// Velocity of a linear solve with its exact radial derivative and the
/// per-mode details.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub v: AxiVectorField,
    /// `∂_r v`, componentwise.
    pub dv: AxiVectorField,
    pub modes: Vec<(ModeKey, ModeSolution)>,
}

impl LinearSolution {
    /// Largest boundary defect over all modes.
    pub fn max_defect(&self) -> f64 {
        self.modes.iter().map(|(_, m)| m.defects.max()).fold(0.0, f64::max)
    }
}

/// Mode-by-mode solver of the linearized problem; caches kernel tables by `|ζ|`.
#[derive(Debug)]
pub struct LinearSolver {
    gamma: f64,
    alpha: f64,
    grid: Arc<RadialGrid>,
    quad: Arc<GridQuadrature>,
    cache: Mutex<HashMap<u64, Arc<ModeOperator>>>,
}

impl LinearSolver {
    pub fn new(gamma: f64, alpha: f64, grid: Arc<RadialGrid>) -> Result<Self> {
        if !(gamma > 2.0) {
            return Err(Error::Validation(format!("gamma must exceed 2, got {gamma}")));
        }
        let quad = Arc::new(GridQuadrature::new(grid.clone()));
        Ok(Self { gamma, alpha, grid, quad, cache: Mutex::new(HashMap::new()) })
    }

    pub fn from_config(cfg: &FlowConfig) -> Result<Self> {
        cfg.validate()?;
        Self::new(cfg.gamma, cfg.alpha, cfg.radial_grid()?)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Same tables, different rotation strength.
    pub fn with_alpha(&self, alpha: f64) -> Self {
        let cache = self.cache.lock().expect("operator cache").clone();
        Self { gamma: self.gamma, alpha, grid: self.grid.clone(), quad: self.quad.clone(), cache: Mutex::new(cache) }
    }

    /// Kernel tables at `|ζ|`, built on first use.
    pub fn operator(&self, zeta: f64) -> Result<Arc<ModeOperator>> {
        let k = if zeta.abs() < ZETA_SWITCH { 0.0 } else { zeta.abs() };
        let key = k.to_bits();
        if let Some(op) = self.cache.lock().expect("operator cache").get(&key) {
            return Ok(op.clone());
        }
        let op = Arc::new(ModeOperator::new(self.gamma, k, self.quad.clone())?);
        self.cache.lock().expect("operator cache").entry(key).or_insert_with(|| op.clone());
        Ok(op)
    }

    pub fn solve_mode(
        &self,
        mode: ModeKind,
        f_r: &RadialProfile,
        f_theta: &RadialProfile,
        f_z: &RadialProfile,
    ) -> Result<ModeSolution> {
        self.operator(mode.zeta())?.solve(mode, self.alpha, f_r, f_theta, f_z)
    }

    /// Solve every mode of `f` in parallel and assemble the velocity.
    pub fn solve(&self, f: &AxiVectorField) -> Result<LinearSolution> {
        let [fr, ft, fz] = f.components();
        let zeta = common_zeta(&[fr, ft, fz])?;
        let mut keys: Vec<ModeKey> = fr.atoms().keys().chain(ft.atoms().keys()).chain(fz.atoms().keys()).map(|&m| ModeKey::Atom(m)).collect();
        keys.sort();
        keys.dedup();
        if let Some(z) = &zeta {
            keys.extend((0..z.len()).map(ModeKey::Density));
        }
        let zero = RadialProfile::zeros(self.grid.clone());
        let pick = |mu: &SpectralMeasure, key: ModeKey| mu.profile(key).cloned().unwrap_or_else(|| zero.clone());
        let solved: Vec<(ModeKey, ModeSolution)> = keys
            .par_iter()
            .map(|&key| {
                let kind = match key {
                    ModeKey::Atom(m) => ModeKind::Atom(m),
                    ModeKey::Density(j) => ModeKind::Continuous(zeta.as_ref().expect("zeta grid").nodes()[j]),
                };
                let (a, b, c) = (pick(fr, key), pick(ft, key), pick(fz, key));
                let sol = if a.is_zero() && b.is_zero() && c.is_zero() {
                    ModeSolution::zero(kind, &self.grid)
                } else {
                    self.solve_mode(kind, &a, &b, &c)
                        .map_err(|e| Error::Mode { mode: format!("{key:?}"), source: Box::new(e) })?
                };
                Ok((key, sol))
            })
            .collect::<Result<Vec<_>>>()?;
        let assemble = |get: &dyn Fn(&ModeSolution) -> &RadialProfile| -> Result<SpectralMeasure> {
            let mut atoms = BTreeMap::new();
            let mut density = Vec::new();
            for (key, sol) in &solved {
                match key {
                    ModeKey::Atom(m) => {
                        atoms.insert(*m, get(sol).clone());
                    }
                    ModeKey::Density(_) => density.push(get(sol).clone()),
                }
            }
            SpectralMeasure::from_parts(self.grid.clone(), zeta.clone(), density, atoms)
        };
        let v = AxiVectorField::new(assemble(&|s| &s.v_r)?, assemble(&|s| &s.v_theta)?, assemble(&|s| &s.v_z)?);
        let dv = AxiVectorField::new(assemble(&|s| &s.dv_r)?, assemble(&|s| &s.dv_theta)?, assemble(&|s| &s.dv_z)?);
        Ok(LinearSolution { v, dv, modes: solved })
    }
}

fn common_zeta(ms: &[&SpectralMeasure]) -> Result<Option<Arc<ZetaGrid>>> {
    let mut out: Option<Arc<ZetaGrid>> = None;
    for m in ms {
        if let Some(z) = m.zeta_grid() {
            match &out {
                Some(o) if **o != **z => return Err(Error::GridMismatch("force components use different zeta grids".into())),
                Some(_) => {}
                None => out = Some(z.clone()),
            }
        }
    }
    Ok(out)
}

impl ModeSolution {
    /// Solution of a mode with zero force.
    pub fn zero(mode: ModeKind, grid: &Arc<RadialGrid>) -> Self {
        let z = RadialProfile::zeros(grid.clone());
        ModeSolution {
            mode,
            psi: z.clone(),
            dpsi: z.clone(),
            omega: z.clone(),
            domega: z.clone(),
            v_r: z.clone(),
            v_theta: z.clone(),
            v_z: z.clone(),
            dv_r: z.clone(),
            dv_theta: z.clone(),
            dv_z: z,
            c: num_complex::Complex64::new(0.0, 0.0),
            defects: super::modes::BoundaryDefects { psi: 0.0, v_r: 0.0, v_theta: 0.0, v_z: 0.0, d_omega: 0.0 },
        }
    }
}

/// Velocity solving the linearized problem with force `f`.
pub fn solve_lp(f: &AxiVectorField, cfg: &FlowConfig) -> Result<AxiVectorField> {
    cfg.validate()?;
    let solver = LinearSolver::new(cfg.gamma, cfg.alpha, f.grid().clone())?;
    Ok(solver.solve(f)?.v)
}
