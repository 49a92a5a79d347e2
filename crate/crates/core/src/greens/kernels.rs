//! Pointwise kernels σ₁–σ₉, the positivity function `F`, the `M`/`N`
//! integrands and the boundary functionals `d[·]`, `c[·]`.

use super::family::{Family, KernelParams};
use super::tables::{GridQuadrature, ModeTable, Source};
use crate::error::{Error, Result};
use crate::function_spaces::RadialProfile;
use crate::quadrature::integrate;
use crate::specfun::scaled_ik;
use num_complex::Complex64;
use std::sync::Arc;

/// Frequency of a mode: a point of the continuous spectrum or an integer atom.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum ModeKind {
    Continuous(f64),
    Atom(i64),
}

impl ModeKind {
    pub fn zeta(self) -> f64 {
        match self {
            ModeKind::Continuous(z) => z,
            ModeKind::Atom(m) => m as f64,
        }
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Outer,
    Below,
    Above,
    Homogeneous,
}

fn kernel_slot(index: u8) -> Result<(Family, Slot)> {
    Ok(match index {
        1 => (Family::Stream, Slot::Outer),
        2 => (Family::Stream, Slot::Below),
        3 => (Family::Stream, Slot::Above),
        4 => (Family::Vorticity, Slot::Homogeneous),
        5 => (Family::Vorticity, Slot::Below),
        6 => (Family::Vorticity, Slot::Above),
        7 => (Family::Swirl, Slot::Outer),
        8 => (Family::Swirl, Slot::Below),
        9 => (Family::Swirl, Slot::Above),
        _ => return Err(Error::Validation(format!("kernel index must be in 1..=9, got {index}"))),
    })
}

/// Kernel `σ_index(r, s)`.
///
/// Slots: 1 and 7 are the boundary corrections `−(u₁(1)/u₂(1)) u₂(r) p(s) u₂(s)/W`,
/// 2, 5, 8 the `s < r` parts `u₂(r) p(s) u₁(s)/W`, 3, 6, 9 the `s > r` parts
/// `u₁(r) p(s) u₂(s)/W`, and 4 the vorticity shape `r^{-γ/2} K_{γ/2+1}(|ζ|r)`
/// (`s` is ignored).
pub fn sigma(index: u8, r: f64, s: f64, params: &KernelParams) -> Result<f64> {
    let (family, slot) = kernel_slot(index)?;
    if !(r >= 1.0 && s >= 1.0) {
        return Err(Error::Domain(format!("kernels need r, s >= 1, got r = {r}, s = {s}")));
    }
    let gamma = params.gamma;
    let g = family.half_gamma(gamma);
    let nu = family.order(gamma);
    if params.is_zero_mode() {
        let w0 = family.zero_mode_wronskian(gamma);
        let u1 = |x: f64| x.powf(nu - g);
        let u2 = |x: f64| x.powf(-g - nu);
        let p = s.powf(1.0 + 2.0 * g);
        return Ok(match slot {
            Slot::Outer => -u2(r) * p * u2(s) / w0,
            Slot::Below => u2(r) * p * u1(s) / w0,
            Slot::Above => u1(r) * p * u2(s) / w0,
            Slot::Homogeneous => u2(r),
        });
    }
    let k = params.zeta.abs();
    let br = scaled_ik(nu, k * r)?;
    let rg = r.powf(-g);
    if let Slot::Homogeneous = slot {
        return Ok(rg * br.k * (-k * r).exp());
    }
    let bs = scaled_ik(nu, k * s)?;
    let sg = s.powf(g + 1.0);
    Ok(match slot {
        Slot::Outer => {
            let b1 = scaled_ik(nu, k)?;
            -(b1.i / b1.k) * rg * br.k * sg * bs.k * (-k * (r - 1.0) - k * (s - 1.0)).exp()
        }
        Slot::Below => rg * br.k * sg * bs.i * (-k * (r - s)).exp(),
        Slot::Above => rg * br.i * sg * bs.k * (-k * (s - r)).exp(),
        Slot::Homogeneous => unreachable!(),
    })
}

/// `F(ζ) e^{2|ζ|}`, the positivity function with its exponential factored out.
pub fn capital_f_scaled(zeta: f64, gamma: f64) -> Result<f64> {
    let params = KernelParams::new(gamma, zeta)?;
    if params.is_zero_mode() {
        return Err(Error::Domain(format!("F is defined for zeta != 0, got {zeta}")));
    }
    let k = zeta.abs();
    let g = 0.5 * gamma;
    let upper = (1.0 + 40.0 / k).ln();
    let f = |t: f64| -> f64 {
        let s = t.exp();
        let a = scaled_ik(1.0, k * s);
        let b = scaled_ik(g + 1.0, k * s);
        match (a, b) {
            (Ok(a), Ok(b)) => s * s.powf(1.0 - g) * a.k * b.k * (-2.0 * k * (s - 1.0)).exp(),
            _ => f64::NAN,
        }
    };
    Ok(integrate(f, 0.0, upper, 1e-300, 1e-13)?.value)
}

/// `F(ζ) = ∫_1^∞ s^{1-γ/2} K₁(|ζ|s) K_{γ/2+1}(|ζ|s) ds`.
pub fn capital_f(zeta: f64, gamma: f64) -> Result<f64> {
    Ok(capital_f_scaled(zeta, gamma)? * (-2.0 * zeta.abs()).exp())
}

/// `(M, N)` at a point: the vorticity sources after integrating the curl of
/// `(g^r, g^z)` by parts. At `ζ = 0` the pair is `(s^{γ+1} g^z, 0)`, matching the
/// `r^{-γ-1}` normalisation of the zero-mode kernels.
pub fn mn_integrands(
    g_r: &RadialProfile,
    g_z: &RadialProfile,
    s: f64,
    zeta: f64,
    gamma: f64,
) -> Result<(Complex64, Complex64)> {
    let params = KernelParams::new(gamma, zeta)?;
    let gr = g_r.eval_extended(s)?;
    let gz = g_z.eval_extended(s)?;
    if params.is_zero_mode() {
        return Ok((gz * s.powf(gamma + 1.0), Complex64::new(0.0, 0.0)));
    }
    let k = zeta.abs();
    let g = 0.5 * gamma;
    let x = k * s;
    let sg = s.powf(g + 1.0);
    let hi = scaled_ik(g + 1.0, x)?;
    let lo = scaled_ik(g, x)?;
    let (eg, ed) = (x.exp(), (-x).exp());
    let iz = Complex64::new(0.0, zeta);
    let m = iz * gr * (sg * hi.i * eg) + gz * (k * sg * lo.i * eg);
    let n = iz * gr * (sg * hi.k * ed) - gz * (k * sg * lo.k * ed);
    Ok((m, n))
}

fn quadrature_for(p: &RadialProfile) -> Arc<GridQuadrature> {
    Arc::new(GridQuadrature::new(p.grid().clone()))
}

/// Boundary functional of the streamfunction problem:
/// `d[h] = (I₁/K₁)(|ζ|) ∫ K₁(|ζ|s) s h ds`, or `½ ∫ b₀` at `ζ = 0`.
pub fn d_coefficient(h: &RadialProfile, kind: ModeKind) -> Result<Complex64> {
    let table = ModeTable::new(Family::Stream, 3.0, kind.zeta(), quadrature_for(h))?;
    d_with_table(&table, h)
}

pub(crate) fn d_with_table(table: &ModeTable, h: &RadialProfile) -> Result<Complex64> {
    let gi = table.integrate(Source::Profile(h), None)?;
    Ok(table.boundary_functional(gi.total()))
}

/// Free constant of the vorticity: `c[Φ̂] = −(1/F) ∫ s K₁(|ζ|s) Φ̂ ds`.
pub fn c_coefficient(phi: &RadialProfile, zeta: f64, gamma: f64) -> Result<Complex64> {
    let params = KernelParams::new(gamma, zeta)?;
    if params.is_zero_mode() {
        return Err(Error::Domain("c_coefficient needs zeta != 0; use c_zero for the zero atom".into()));
    }
    let table = ModeTable::new(Family::Stream, gamma, zeta, quadrature_for(phi))?;
    let gi = table.integrate(Source::Profile(phi), None)?;
    // gi.total() = e^{k} ∫ s K₁(ks) Φ̂ ds and F = F̃ e^{-2k}.
    let k = zeta.abs();
    Ok(-gi.total() * k.exp() / capital_f_scaled(zeta, gamma)?)
}

/// `c[a₀] = −∫ t a₀^z(t) dt` for the zero atom.
pub fn c_zero(a0_z: &RadialProfile) -> Result<Complex64> {
    Ok(-quadrature_for(a0_z).moment(a0_z, 1.0)?)
}
