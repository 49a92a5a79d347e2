//! Single-mode solves: swirl, vorticity with its free constant, streamfunction
//! and the Biot–Savart velocities.

use crate::error::{Error, Result};
use crate::function_spaces::{RadialGrid, RadialProfile};
use crate::greens::{Family, GridQuadrature, ModeKind, ModeTable, ModeValues, Source, ZETA_SWITCH};
use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

/// Tail exponent of the solution of `family` driven by a source decaying like
/// `r^{-p}`.
pub fn response_tail(family: Family, gamma: f64, zero_mode: bool, p: f64) -> f64 {
    if zero_mode {
        (p - 2.0).min(family.zero_mode_decay(gamma))
    } else {
        p
    }
}

fn profile(grid: &Arc<RadialGrid>, values: Vec<Complex64>, tail: f64) -> Result<RadialProfile> {
    RadialProfile::new(grid.clone(), values, tail)
}

/// Boundary values of a solved mode.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryDefects {
    pub psi: f64,
    pub v_r: f64,
    pub v_theta: f64,
    pub v_z: f64,
    /// `|d[ω̂]|` of the assembled vorticity.
    pub d_omega: f64,
}

impl BoundaryDefects {
    pub fn max(&self) -> f64 {
        [self.psi, self.v_r, self.v_theta, self.v_z, self.d_omega].into_iter().fold(0.0, f64::max)
    }
}

/// All profiles of one solved mode, with exact radial derivatives.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub mode: ModeKind,
    pub psi: RadialProfile,
    pub dpsi: RadialProfile,
    pub omega: RadialProfile,
    pub domega: RadialProfile,
    pub v_r: RadialProfile,
    pub v_theta: RadialProfile,
    pub v_z: RadialProfile,
    pub dv_r: RadialProfile,
    pub dv_theta: RadialProfile,
    pub dv_z: RadialProfile,
    /// Free constant of the vorticity, `c` in `ω̂ = c r^{-γ/2} K_{γ/2+1}(|ζ|r) + Φ̂`.
    pub c: Complex64,
    pub defects: BoundaryDefects,
}

/// Kernel tables of all three families at one `|ζ|`, plus the streamfunction
/// response to the homogeneous vorticity.
#[derive(Debug)]
pub struct ModeOperator {
    pub gamma: f64,
    pub k: f64,
    stream: ModeTable,
    vort: ModeTable,
    swirl: ModeTable,
    hom_psi: ModeValues,
    hom_d: Complex64,
}

impl ModeOperator {
    pub fn new(gamma: f64, zeta: f64, quad: Arc<GridQuadrature>) -> Result<Self> {
        let stream = ModeTable::new(Family::Stream, gamma, zeta, quad.clone())?;
        let vort = ModeTable::new(Family::Vorticity, gamma, zeta, quad.clone())?;
        let swirl = ModeTable::new(Family::Swirl, gamma, zeta, quad)?;
        let hom = |s: f64| Complex64::new(vort.homogeneous_at(s).unwrap_or(f64::NAN), 0.0);
        let gi = stream.integrate(Source::Function(&hom), None)?;
        let hom_d = stream.boundary_functional(gi.total());
        let hom_psi = stream.dirichlet_solution(&gi);
        if !(hom_d.re > 0.0) {
            return Err(Error::Numerical(format!("boundary functional of the homogeneous vorticity is {hom_d}")));
        }
        Ok(Self { gamma, k: stream.k, stream, vort, swirl, hom_psi, hom_d })
    }

    pub fn is_zero_mode(&self) -> bool {
        self.stream.is_zero_mode()
    }

    pub fn table(&self, family: Family) -> &ModeTable {
        match family {
            Family::Stream => &self.stream,
            Family::Vorticity => &self.vort,
            Family::Swirl => &self.swirl,
        }
    }

    fn grid(&self) -> &Arc<RadialGrid> {
        self.stream.quadrature().grid()
    }

    /// `L_stream ψ = h`, `ψ(1) = 0`; returns `(ψ, ψ', d[h])`.
    pub fn stream(&self, h: &RadialProfile) -> Result<(RadialProfile, RadialProfile, Complex64)> {
        let gi = self.stream.integrate(Source::Profile(h), None)?;
        let sol = self.stream.dirichlet_solution(&gi);
        let tail = response_tail(Family::Stream, self.gamma, self.is_zero_mode(), h.tail_exponent());
        let d = self.stream.boundary_functional(gi.total());
        Ok((profile(self.grid(), sol.value, tail)?, profile(self.grid(), sol.deriv, tail + 1.0)?, d))
    }

    /// `L_swirl v = f`, `v(1) = 0`; returns `(v, v')`.
    pub fn swirl(&self, f: &RadialProfile) -> Result<(RadialProfile, RadialProfile)> {
        let sol = self.swirl.solve_dirichlet(Source::Profile(f))?;
        let tail = response_tail(Family::Swirl, self.gamma, self.is_zero_mode(), f.tail_exponent());
        Ok((profile(self.grid(), sol.value, tail)?, profile(self.grid(), sol.deriv, tail + 1.0)?))
    }

    /// Vorticity of `iζ g_r − ∂_r g_z + extra` with the free constant fixed by
    /// `d[ω̂] = 0`, together with the streamfunction of that vorticity.
    pub fn vorticity(&self, zeta: f64, g_r: &RadialProfile, g_z: &RadialProfile, extra: Option<&RadialProfile>) -> Result<VorticityParts> {
        let grid = self.grid().clone();
        let zero = self.is_zero_mode();
        let iz = Complex64::new(0.0, if zero { 0.0 } else { zeta });
        let mut s1 = g_r.scale(iz);
        if zero {
            s1 = RadialProfile::zeros(grid.clone());
        }
        if let Some(e) = extra {
            s1 = s1.add(e)?;
        }
        let gi = self.vort.integrate(Source::Profile(&s1), Some(Source::Profile(g_z)))?;
        let phi = self.vort.free_solution(&gi);
        let src_tail = s1.tail_exponent().min(g_z.tail_exponent() + 1.0);
        let tail = response_tail(Family::Vorticity, self.gamma, zero, src_tail);
        let phi_p = profile(&grid, phi.value.clone(), tail)?;
        let (psi_phi, dpsi_phi, d_phi) = self.stream(&phi_p)?;
        let c_scaled = -d_phi / self.hom_d;
        let hom = self.vort.homogeneous();
        let dhom = self.vort.homogeneous_deriv();
        let omega: Vec<Complex64> = phi.value.iter().zip(hom).map(|(p, h)| p + c_scaled * h).collect();
        let domega: Vec<Complex64> = phi.deriv.iter().zip(&dhom).map(|(p, h)| p + c_scaled * h).collect();
        let psi: Vec<Complex64> =
            psi_phi.values().iter().zip(&self.hom_psi.value).map(|(p, h)| p + c_scaled * h).collect();
        let dpsi: Vec<Complex64> =
            dpsi_phi.values().iter().zip(&self.hom_psi.deriv).map(|(p, h)| p + c_scaled * h).collect();
        let omega = profile(&grid, omega, tail)?;
        let psi_tail = response_tail(Family::Stream, self.gamma, zero, tail);
        // Independent re-integration of the assembled vorticity.
        let d_omega = crate::greens::d_with_table(&self.stream, &omega)?;
        Ok(VorticityParts {
            domega: profile(&grid, domega, tail + 1.0)?,
            omega,
            psi: profile(&grid, psi, psi_tail)?,
            dpsi: profile(&grid, dpsi, psi_tail + 1.0)?,
            c: c_scaled * self.k.exp(),
            d_omega,
        })
    }

    /// Full linear solve of one mode.
    pub fn solve(
        &self,
        mode: ModeKind,
        alpha: f64,
        f_r: &RadialProfile,
        f_theta: &RadialProfile,
        f_z: &RadialProfile,
    ) -> Result<ModeSolution> {
        let zeta = mode.zeta();
        let zero = self.is_zero_mode();
        let iz = Complex64::new(0.0, if zero { 0.0 } else { zeta });
        let (v_theta, dv_theta) = if f_theta.is_zero() {
            (RadialProfile::zeros(self.grid().clone()), RadialProfile::zeros(self.grid().clone()))
        } else {
            self.swirl(f_theta)?
        };
        let extra = if alpha != 0.0 && !zero && !v_theta.is_zero() {
            Some(v_theta.div_r_pow(2.0).scale(iz * (2.0 * alpha)))
        } else {
            None
        };
        let vp = self.vorticity(zeta, f_r, f_z, extra.as_ref())?;
        let (v_r, v_z) = biot_savart_values(&vp.psi, &vp.dpsi, if zero { 0.0 } else { zeta })?;
        let dv_r = vp.dpsi.scale(-iz);
        // ∂_r v_z = ζ² ψ − ω.
        let dv_z = vp.psi.scale_real(if zero { 0.0 } else { zeta * zeta }).sub(&vp.omega)?;
        let defects = BoundaryDefects {
            psi: vp.psi.values()[0].norm(),
            v_r: v_r.values()[0].norm(),
            v_theta: v_theta.values()[0].norm(),
            v_z: v_z.values()[0].norm(),
            d_omega: vp.d_omega.norm(),
        };
        Ok(ModeSolution {
            mode,
            psi: vp.psi,
            dpsi: vp.dpsi,
            omega: vp.omega,
            domega: vp.domega,
            v_r,
            v_theta,
            v_z,
            dv_r,
            dv_theta,
            dv_z,
            c: vp.c,
            defects,
        })
    }
}

/// Vorticity and streamfunction of one mode.
#[derive(Debug, Clone)]
pub struct VorticityParts {
    pub omega: RadialProfile,
    pub domega: RadialProfile,
    pub psi: RadialProfile,
    pub dpsi: RadialProfile,
    pub c: Complex64,
    pub d_omega: Complex64,
}

fn biot_savart_values(psi: &RadialProfile, dpsi: &RadialProfile, zeta: f64) -> Result<(RadialProfile, RadialProfile)> {
    let v_r = psi.scale(Complex64::new(0.0, -zeta));
    let v_z = psi.div_r_pow(1.0).add(dpsi)?;
    // ψ/r decays one power faster than ψ'; keep the slower of the two.
    let tail = (psi.tail_exponent() + 1.0).min(dpsi.tail_exponent());
    Ok((v_r, v_z.with_tail(tail)))
}

fn operator(zeta: f64, gamma: f64, grid: &Arc<RadialGrid>) -> Result<ModeOperator> {
    ModeOperator::new(gamma, zeta, Arc::new(GridQuadrature::new(grid.clone())))
}

/// Streamfunction of a vorticity profile: `(ψ̂, dψ̂/dr, d[h])`.
pub fn solve_stream_mode(h: &RadialProfile, mode: ModeKind) -> Result<(RadialProfile, RadialProfile, Complex64)> {
    // The stream operator does not involve γ; any admissible value will do.
    let table = ModeTable::new(Family::Stream, 3.0, mode.zeta(), Arc::new(GridQuadrature::new(h.grid().clone())))?;
    let gi = table.integrate(Source::Profile(h), None)?;
    let sol = table.dirichlet_solution(&gi);
    let zero = table.is_zero_mode();
    let tail = response_tail(Family::Stream, 3.0, zero, h.tail_exponent());
    let d = table.boundary_functional(gi.total());
    Ok((profile(h.grid(), sol.value, tail)?, profile(h.grid(), sol.deriv, tail + 1.0)?, d))
}

/// `v_r = −iζψ̂`, `v_z = ψ̂/r + dψ̂/dr`.
pub fn biot_savart_mode(psi: &RadialProfile, dpsi: &RadialProfile, mode: ModeKind) -> Result<(RadialProfile, RadialProfile)> {
    let z = mode.zeta();
    biot_savart_values(psi, dpsi, if z.abs() < ZETA_SWITCH { 0.0 } else { z })
}

/// Vorticity of the force `(g_r, g_z)` (plus an optional direct source) with
/// the free constant chosen so that `d[ω̂] = 0`.
pub fn solve_vorticity_mode(
    g_r: &RadialProfile,
    g_z: &RadialProfile,
    mode: ModeKind,
    gamma: f64,
    extra_source: Option<&RadialProfile>,
) -> Result<VorticityParts> {
    operator(mode.zeta(), gamma, g_r.grid())?.vorticity(mode.zeta(), g_r, g_z, extra_source)
}

/// Swirl `v̂^θ` of an azimuthal force.
pub fn solve_swirl_mode(f_theta: &RadialProfile, mode: ModeKind, gamma: f64) -> Result<RadialProfile> {
    let table = ModeTable::new(Family::Swirl, gamma, mode.zeta(), Arc::new(GridQuadrature::new(f_theta.grid().clone())))?;
    let sol = table.solve_dirichlet(Source::Profile(f_theta))?;
    let tail = response_tail(Family::Swirl, gamma, table.is_zero_mode(), f_theta.tail_exponent());
    profile(f_theta.grid(), sol.value, tail)
}

/// Everything about one mode from scratch; convenient for single-mode checks.
pub fn solve_mode(
    mode: ModeKind,
    gamma: f64,
    alpha: f64,
    f_r: &RadialProfile,
    f_theta: &RadialProfile,
    f_z: &RadialProfile,
) -> Result<ModeSolution> {
    operator(mode.zeta(), gamma, f_r.grid())?.solve(mode, alpha, f_r, f_theta, f_z)
}
