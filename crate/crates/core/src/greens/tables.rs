//! Panel quadrature of the Green's representations on a radial grid.
//!
//! For a family with homogeneous solutions `u₁` (growing) and `u₂` (decaying)
//! and weight `p(s) = s^{1+γ_e}`, a mode solution is assembled from
//!
//! ```text
//! P(r) = u₂(r) ∫_1^r A₁ S ds,      Q(r) = u₁(r) ∫_r^∞ A₂ S ds,
//! ```
//!
//! with `A_j = p u_j / W`. Both integrals are accumulated panel by panel with
//! the exponential parts of `I` and `K` factored out, so every recurrence
//! factor is at most one and nothing overflows for large `|ζ| r`. Sources are
//! sampled at 8 Gauss points per panel by 6-point Lagrange interpolation in
//! `ln r`; beyond `R_max` they follow the power-law tail of the profile.

use super::family::{Family, ZETA_SWITCH};
use crate::error::{Error, Result};
use crate::function_spaces::{RadialGrid, RadialProfile};
use crate::quadrature::{gauss_legendre_unit, integrate};
use crate::specfun::scaled_ik;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub const GAUSS_POINTS: usize = 8;
const INTERP: usize = 6;
/// Tail integrals run over `[R, R e^{TAIL_SPAN}]`.
const TAIL_SPAN: f64 = 25.0;

/// Gauss points, weights and interpolation stencils of a radial grid.
#[derive(Debug)]
pub struct GridQuadrature {
    grid: Arc<RadialGrid>,
    s: Vec<f64>,
    w: Vec<f64>,
    stencil: Vec<(usize, [f64; INTERP])>,
}

impl GridQuadrature {
    pub fn new(grid: Arc<RadialGrid>) -> Self {
        let rule = gauss_legendre_unit();
        let h = grid.step();
        let panels = grid.len() - 1;
        let mut s = Vec::with_capacity(panels * GAUSS_POINTS);
        let mut w = Vec::with_capacity(panels * GAUSS_POINTS);
        let mut stencil = Vec::with_capacity(panels * GAUSS_POINTS);
        for i in 0..panels {
            for &(x, wx) in &rule {
                let sg = ((i as f64 + x) * h).exp();
                s.push(sg);
                w.push(wx * h * sg);
                let (start, lw) = grid.lagrange(i, x, INTERP);
                let mut arr = [0.0; INTERP];
                arr.copy_from_slice(&lw);
                stencil.push((start, arr));
            }
        }
        Self { grid, s, w, stencil }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn points(&self) -> &[f64] {
        &self.s
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Profile values at the Gauss points.
    pub fn sample(&self, p: &RadialProfile) -> Vec<Complex64> {
        let v = p.values();
        self.stencil
            .iter()
            .map(|(start, lw)| lw.iter().enumerate().map(|(j, c)| v[start + j] * *c).sum())
            .collect()
    }

    /// `∫_1^∞ s^q p(s) ds`, with the power-law tail integrated in closed form.
    pub fn moment(&self, p: &RadialProfile, q: f64) -> Result<Complex64> {
        let body: Complex64 = self
            .sample(p)
            .iter()
            .zip(&self.s)
            .zip(&self.w)
            .map(|((v, s), w)| v * (w * s.powf(q)))
            .sum();
        let last = p.values()[p.values().len() - 1];
        let tail_p = p.tail_exponent();
        if last.norm() == 0.0 || tail_p.is_infinite() {
            return Ok(body);
        }
        if tail_p <= q + 1.0 {
            return Err(Error::Divergent(format!(
                "moment of order {q} needs tail exponent > {}, got {tail_p}",
                q + 1.0
            )));
        }
        let r = self.grid.r_max();
        Ok(body + last * (r.powf(q + 1.0) / (tail_p - q - 1.0)))
    }
}

/// Right-hand side of a mode problem.
#[derive(Clone, Copy)]
pub enum Source<'a> {
    Profile(&'a RadialProfile),
    /// Exact function of `s`, sampled directly at the Gauss points.
    Function(&'a (dyn Fn(f64) -> Complex64 + Sync)),
}

/// Accumulated panel integrals: `J_i = P(r_i)/ũ₂(r_i)`, `K_i = Q(r_i)/ũ₁(r_i)`.
#[derive(Debug, Clone)]
pub struct GreenIntegrals {
    pub j: Vec<Complex64>,
    pub k: Vec<Complex64>,
}

impl GreenIntegrals {
    /// `∫_1^∞ A₂ S e^{-|ζ|(s-1)} ds`.
    pub fn total(&self) -> Complex64 {
        self.k[0]
    }
}

/// Values and radial derivative of a mode solution on the grid nodes.
#[derive(Debug, Clone)]
pub struct ModeValues {
    pub value: Vec<Complex64>,
    pub deriv: Vec<Complex64>,
    /// `∫_1^∞ A₂ S e^{-|ζ|(s-1)} ds` for the boundary functional.
    pub total: Complex64,
}

/// Kernel samples of one family at one `|ζ|` on one grid.
#[derive(Debug)]
pub struct ModeTable {
    pub family: Family,
    pub gamma: f64,
    pub k: f64,
    zero: bool,
    g: f64,
    nu: f64,
    quad: Arc<GridQuadrature>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
    a1p: Vec<f64>,
    a2p: Vec<f64>,
    up: Vec<f64>,
    dn: Vec<f64>,
    dec: Vec<f64>,
    hom: Vec<f64>,
    tail_cache: Mutex<HashMap<(u64, bool), f64>>,
}

impl ModeTable {
    pub fn new(family: Family, gamma: f64, zeta: f64, quad: Arc<GridQuadrature>) -> Result<Self> {
        if !(gamma > 2.0) {
            return Err(Error::Validation(format!("gamma must exceed 2, got {gamma}")));
        }
        let k = zeta.abs();
        let zero = k < ZETA_SWITCH;
        let k = if zero { 0.0 } else { k };
        let g = family.half_gamma(gamma);
        let nu = family.order(gamma);
        let nodes = quad.grid.nodes().to_vec();
        let n = nodes.len();
        let ng = quad.s.len();
        let with_prime = family == Family::Vorticity;
        let mut t = Self {
            family,
            gamma,
            k,
            zero,
            g,
            nu,
            quad: quad.clone(),
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            l1: vec![0.0; n],
            l2: vec![0.0; n],
            a1: vec![0.0; ng],
            a2: vec![0.0; ng],
            a1p: if with_prime { vec![0.0; ng] } else { Vec::new() },
            a2p: if with_prime { vec![0.0; ng] } else { Vec::new() },
            up: vec![1.0; ng],
            dn: vec![1.0; ng],
            dec: vec![1.0; n - 1],
            hom: vec![0.0; n],
            tail_cache: Mutex::new(HashMap::new()),
        };
        if zero {
            let w0 = family.zero_mode_wronskian(gamma);
            for (i, &r) in nodes.iter().enumerate() {
                t.u1[i] = r.powf(nu - g);
                t.u2[i] = r.powf(-g - nu);
                t.l1[i] = (nu - g) / r;
                t.l2[i] = (-g - nu) / r;
                t.hom[i] = t.u2[i];
            }
            for (j, &s) in quad.s.iter().enumerate() {
                t.a1[j] = s.powf(g + 1.0 + nu) / w0;
                t.a2[j] = s.powf(g + 1.0 - nu) / w0;
                if with_prime {
                    t.a1p[j] = (g + 1.0 + nu) * s.powf(g + nu) / w0;
                    t.a2p[j] = (g + 1.0 - nu) * s.powf(g - nu) / w0;
                }
            }
            return Ok(t);
        }
        for (i, &r) in nodes.iter().enumerate() {
            let b = scaled_ik(nu, k * r)?;
            let rg = r.powf(-g);
            t.u1[i] = rg * b.i;
            t.u2[i] = rg * b.k;
            t.l1[i] = -g / r + k * b.di / b.i;
            t.l2[i] = -g / r + k * b.dk / b.k;
            t.hom[i] = t.u2[i] * (-k * (r - 1.0)).exp();
        }
        for i in 0..n - 1 {
            t.dec[i] = (-k * (nodes[i + 1] - nodes[i])).exp();
        }
        for (j, &s) in quad.s.iter().enumerate() {
            let panel = j / GAUSS_POINTS;
            let b = scaled_ik(nu, k * s)?;
            let sg = s.powf(g + 1.0);
            t.a1[j] = sg * b.i;
            t.a2[j] = sg * b.k;
            if with_prime {
                // (s^{G+1} I_{G+1}(ks))' = k s^{G+1} I_G(ks), and likewise −k s^{G+1} K_G.
                let bg = scaled_ik(g, k * s)?;
                t.a1p[j] = k * sg * bg.i;
                t.a2p[j] = -k * sg * bg.k;
            }
            t.up[j] = (-k * (nodes[panel + 1] - s)).exp();
            t.dn[j] = (-k * (s - nodes[panel])).exp();
        }
        Ok(t)
    }

    pub fn is_zero_mode(&self) -> bool {
        self.zero
    }

    pub fn quadrature(&self) -> &Arc<GridQuadrature> {
        &self.quad
    }

    /// `u₁(1)/u₂(1)` in scaled form.
    pub fn boundary_ratio(&self) -> f64 {
        self.u1[0] / self.u2[0]
    }

    /// Decaying homogeneous solution normalised as `u₂(r) e^{|ζ|}` (just
    /// `r^{-γ_e/2-ν}` at `ζ = 0`).
    pub fn homogeneous(&self) -> &[f64] {
        &self.hom
    }

    /// Radial derivative of [`homogeneous`](Self::homogeneous).
    pub fn homogeneous_deriv(&self) -> Vec<f64> {
        self.hom.iter().zip(&self.l2).map(|(h, l)| h * l).collect()
    }

    /// Decaying homogeneous solution at an arbitrary `r ≥ 1`, same
    /// normalisation as [`homogeneous`](Self::homogeneous).
    pub fn homogeneous_at(&self, r: f64) -> Result<f64> {
        if self.zero {
            return Ok(r.powf(-self.g - self.nu));
        }
        let b = scaled_ik(self.nu, self.k * r)?;
        Ok(r.powf(-self.g) * b.k * (-self.k * (r - 1.0)).exp())
    }

    fn sample(&self, src: Source<'_>) -> Vec<Complex64> {
        match src {
            Source::Profile(p) => self.quad.sample(p),
            Source::Function(f) => self.quad.s.iter().map(|&s| f(s)).collect(),
        }
    }

    /// `∫_R^∞ A(s) e^{-k(s-R)} (s/R)^{-p} ds` for `A = A₂` or `A = A₂'`.
    fn tail_kernel(&self, p: f64, prime: bool) -> Result<f64> {
        let key = (p.to_bits(), prime);
        if let Some(v) = self.tail_cache.lock().expect("tail cache").get(&key) {
            return Ok(*v);
        }
        let r = self.quad.grid.r_max();
        let (g, nu, k) = (self.g, self.nu, self.k);
        let v = if self.zero {
            let w0 = self.family.zero_mode_wronskian(self.gamma);
            let (coef, q) = if prime { (g + 1.0 - nu, g - nu) } else { (1.0, g + 1.0 - nu) };
            if coef == 0.0 {
                0.0
            } else if p <= q + 1.0 {
                return Err(Error::Divergent(format!(
                    "{:?} kernel tail needs source decay faster than r^-{}, got r^-{p}",
                    self.family,
                    q + 1.0
                )));
            } else {
                coef * r.powf(q + 1.0) / ((p - q - 1.0) * w0)
            }
        } else {
            let t0 = r.ln();
            let order = if prime { g } else { nu };
            let sign = if prime { -k } else { 1.0 };
            let f = |t: f64| -> f64 {
                let s = t.exp();
                match scaled_ik(order, k * s) {
                    Ok(b) => sign * s * s.powf(g + 1.0) * b.k * (-k * (s - r)).exp() * (s / r).powf(-p),
                    Err(_) => f64::NAN,
                }
            };
            integrate(f, t0, t0 + TAIL_SPAN, 1e-300, 1e-12)?.value
        };
        self.tail_cache.lock().expect("tail cache").insert(key, v);
        Ok(v)
    }

    /// Tail contribution `∫_R^∞ A S e^{-k(s-R)} ds` of one source.
    fn tail(&self, src: Source<'_>, prime: bool) -> Result<Complex64> {
        match src {
            Source::Profile(p) => {
                let last = p.values()[p.values().len() - 1];
                if last.norm() == 0.0 || p.tail_exponent().is_infinite() {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(last * self.tail_kernel(p.tail_exponent(), prime)?)
            }
            Source::Function(f) => {
                let r = self.quad.grid.r_max();
                let t0 = r.ln();
                let (g, nu, k, zero) = (self.g, self.nu, self.k, self.zero);
                let w0 = self.family.zero_mode_wronskian(self.gamma);
                let kern = |s: f64| -> f64 {
                    if zero {
                        if prime {
                            (g + 1.0 - nu) * s.powf(g - nu) / w0
                        } else {
                            s.powf(g + 1.0 - nu) / w0
                        }
                    } else {
                        let order = if prime { g } else { nu };
                        let sign = if prime { -k } else { 1.0 };
                        match scaled_ik(order, k * s) {
                            Ok(b) => sign * s.powf(g + 1.0) * b.k * (-k * (s - r)).exp(),
                            Err(_) => f64::NAN,
                        }
                    }
                };
                let re = integrate(|t: f64| { let s = t.exp(); s * kern(s) * f(s).re }, t0, t0 + TAIL_SPAN, 1e-300, 1e-12)?;
                let im = integrate(|t: f64| { let s = t.exp(); s * kern(s) * f(s).im }, t0, t0 + TAIL_SPAN, 1e-300, 1e-12)?;
                Ok(Complex64::new(re.value, im.value))
            }
        }
    }

    /// Panel recursions for `S₁` paired with `(A₁, A₂)` and `S₂` paired with
    /// `(A₁', A₂')` (vorticity family only).
    pub fn integrate(&self, s1: Source<'_>, s2: Option<Source<'_>>) -> Result<GreenIntegrals> {
        if s2.is_some() && self.a1p.is_empty() {
            return Err(Error::Validation(format!("{:?} kernels take a single source", self.family)));
        }
        let n = self.u1.len();
        let v1 = self.sample(s1);
        let v2 = s2.map(|s| self.sample(s));
        let w = &self.quad.w;
        let mut j = vec![Complex64::new(0.0, 0.0); n];
        let mut kk = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n - 1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for q in i * GAUSS_POINTS..(i + 1) * GAUSS_POINTS {
                let mut src = v1[q] * self.a1[q];
                if let Some(v2) = &v2 {
                    src += v2[q] * self.a1p[q];
                }
                acc += src * (w[q] * self.up[q]);
            }
            j[i + 1] = j[i] * self.dec[i] + acc;
        }
        let mut tail = self.tail(s1, false)?;
        if let Some(s2) = s2 {
            tail += self.tail(s2, true)?;
        }
        kk[n - 1] = tail;
        for i in (0..n - 1).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for q in i * GAUSS_POINTS..(i + 1) * GAUSS_POINTS {
                let mut src = v1[q] * self.a2[q];
                if let Some(v2) = &v2 {
                    src += v2[q] * self.a2p[q];
                }
                acc += src * (w[q] * self.dn[q]);
            }
            kk[i] = kk[i + 1] * self.dec[i] + acc;
        }
        Ok(GreenIntegrals { j, k: kk })
    }

    /// Particular solution `P + Q` (no boundary condition imposed).
    pub fn free_solution(&self, gi: &GreenIntegrals) -> ModeValues {
        let n = self.u1.len();
        let mut value = Vec::with_capacity(n);
        let mut deriv = Vec::with_capacity(n);
        for i in 0..n {
            let p = gi.j[i] * self.u2[i];
            let q = gi.k[i] * self.u1[i];
            value.push(p + q);
            deriv.push(p * self.l2[i] + q * self.l1[i]);
        }
        ModeValues { value, deriv, total: gi.total() }
    }

    /// Solution with `v(1) = 0` and decay at infinity.
    pub fn dirichlet_solution(&self, gi: &GreenIntegrals) -> ModeValues {
        let mut out = self.free_solution(gi);
        let c = gi.total() * self.boundary_ratio();
        for i in 0..out.value.len() {
            let h = c * self.hom[i];
            out.value[i] -= h;
            out.deriv[i] -= h * self.l2[i];
        }
        out
    }

    /// Solve `L v = S` with `v(1) = 0`.
    pub fn solve_dirichlet(&self, src: Source<'_>) -> Result<ModeValues> {
        Ok(self.dirichlet_solution(&self.integrate(src, None)?))
    }

    /// Converts a scaled total `∫ A₂ S e^{-k(s-1)}` into the boundary functional
    /// `(u₁(1)/u₂(1)) ∫ A₂ S` of the unscaled problem.
    pub fn boundary_functional(&self, total: Complex64) -> Complex64 {
        total * (self.boundary_ratio() * self.k.exp())
    }
}
