//! Finite-difference boundary-value solver for the three mode equations.
//!
//! Works in `t = ln r`, where every mode operator becomes
//! `−v_tt − γ_e v_t + (ζ² r² + c) v = r² S`, on a uniform grid with second-order
//! central differences, a Dirichlet value at `r = 1` and a Robin closure
//! `r v_r + p v = 0` at `r_out`. Two grid levels are combined by Richardson
//! extrapolation. No Bessel function is used anywhere in this file.

use crate::error::{Error, Result};
use crate::function_spaces::{RadialGrid, RadialProfile};
use crate::greens::Family;
use num_complex::Complex64;
use std::sync::Arc;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// One mode boundary-value problem.
pub struct OracleProblem<'a> {
    pub family: Family,
    pub zeta: f64,
    pub gamma: f64,
    /// Right-hand side `S(r)`.
    pub rhs: Box<dyn Fn(f64) -> Complex64 + Sync + 'a>,
    /// Value at `r = 1`.
    pub inner: Complex64,
    /// Robin exponent `p` in `r v_r + p v = 0` at `r_out`.
    pub robin: f64,
    pub r_out: f64,
    /// Intervals of the coarse level.
    pub intervals: usize,
    /// Combine two levels by Richardson extrapolation.
    pub richardson: bool,
}

impl<'a> OracleProblem<'a> {
    /// Problem with defaults: zero inner value, 8192 intervals with
    /// extrapolation, `r_out = 10⁶` at `ζ = 0` (32768 intervals) and
    /// `1 + 60/|ζ|` otherwise, Robin closure from [`source_robin`].
    pub fn new(family: Family, zeta: f64, gamma: f64, rhs: impl Fn(f64) -> Complex64 + Sync + 'a) -> Self {
        let zero = zeta.abs() < crate::greens::ZETA_SWITCH;
        let (r_out, intervals) = if zero { (1e6, 32768) } else { (1.0 + 60.0 / zeta.abs(), 8192) };
        let mut p = Self {
            family,
            zeta,
            gamma,
            rhs: Box::new(rhs),
            inner: ZERO,
            robin: 0.0,
            r_out,
            intervals,
            richardson: true,
        };
        p.robin = source_robin(family, gamma, zeta, r_out, p.rhs.as_ref());
        p
    }

    /// Right-hand side taken from a profile (tail model beyond its grid).
    pub fn from_profile(family: Family, zeta: f64, gamma: f64, rhs: &'a RadialProfile) -> Self {
        Self::new(family, zeta, gamma, move |r| rhs.eval_extended(r).unwrap_or(ZERO))
    }

    pub fn with_outer(mut self, r_out: f64) -> Self {
        self.r_out = r_out;
        self.robin = source_robin(self.family, self.gamma, self.zeta, r_out, self.rhs.as_ref());
        self
    }

    pub fn with_robin(mut self, p: f64) -> Self {
        self.robin = p;
        self
    }

    pub fn with_intervals(mut self, n: usize) -> Self {
        self.intervals = n;
        self
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }
}

/// Decay exponent of the decaying homogeneous solution at `ζ = 0`, or the
/// local exponential rate `|ζ| r_out` otherwise.
pub fn default_robin(family: Family, gamma: f64, zeta: f64, r_out: f64) -> f64 {
    if zeta == 0.0 {
        family.zero_mode_decay(gamma)
    } else {
        zeta.abs() * r_out
    }
}

/// As [`default_robin`], but at `ζ = 0` a source decaying like `r^{-q}` with
/// `q − 2` below the homogeneous rate forces a particular solution decaying
/// like `r^{2−q}`; the closure then uses that exponent.
pub fn source_robin(family: Family, gamma: f64, zeta: f64, r_out: f64, rhs: &(dyn Fn(f64) -> Complex64 + Sync)) -> f64 {
    let p = default_robin(family, gamma, zeta, r_out);
    if zeta != 0.0 {
        return p;
    }
    let (a, b) = (rhs(r_out).norm(), rhs(0.5 * r_out).norm());
    if !(a > 0.0 && b > 0.0) {
        return p;
    }
    let q = (b / a).log2();
    if q.is_finite() {
        p.min(q - 2.0)
    } else {
        p
    }
}

/// Solution of an [`OracleProblem`] on its uniform `ln r` grid.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub step: f64,
    pub values: Vec<Complex64>,
    pub robin: f64,
}

impl OracleSolution {
    pub fn r(&self, j: usize) -> f64 {
        (j as f64 * self.step).exp()
    }

    pub fn r_out(&self) -> f64 {
        self.r(self.values.len() - 1)
    }

    /// Cubic interpolation in `ln r`; Robin tail beyond `r_out`.
    pub fn eval(&self, r: f64) -> Result<Complex64> {
        if !(r >= 1.0) {
            return Err(Error::OutOfGrid(format!("oracle evaluated at r = {r} < 1")));
        }
        let n = self.values.len() - 1;
        let t = r.ln() / self.step;
        if t >= n as f64 {
            return Ok(self.values[n] * (r / self.r_out()).powf(-self.robin));
        }
        let i = (t.floor() as usize).min(n - 1);
        let start = i.saturating_sub(1).min(n.saturating_sub(3));
        let x = t - start as f64;
        let mut out = ZERO;
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (x - b as f64) / (a as f64 - b as f64);
                }
            }
            out += self.values[start + a] * w;
        }
        Ok(out)
    }

    /// `dv/dr` at `r = 1` by a fourth-order one-sided difference.
    pub fn boundary_derivative(&self) -> Complex64 {
        boundary_slope(&self.values, self.step)
    }

    /// Samples on the nodes of `grid` (Robin tail beyond `r_out`).
    pub fn to_profile(&self, grid: &Arc<RadialGrid>) -> Result<RadialProfile> {
        let values = grid.nodes().iter().map(|&r| self.eval(r)).collect::<Result<Vec<_>>>()?;
        RadialProfile::new(grid.clone(), values, self.robin)
    }
}

fn boundary_slope(v: &[Complex64], h: f64) -> Complex64 {
    (v[0] * (-25.0) + v[1] * 48.0 - v[2] * 36.0 + v[3] * 16.0 - v[4] * 3.0) / (12.0 * h)
}

/// Raw second-order solve on `n` intervals of `[0, ln r_out]`.
fn solve_level(
    family: Family,
    zeta: f64,
    gamma: f64,
    rhs: &[Complex64],
    inner: Complex64,
    robin: f64,
    r_out: f64,
    n: usize,
) -> Result<Vec<Complex64>> {
    let h = r_out.ln() / n as f64;
    let ge = family.gamma_eff(gamma);
    let c = family.potential(gamma);
    let (lo, hi) = (1.0 / (h * h) - ge / (2.0 * h), 1.0 / (h * h) + ge / (2.0 * h));
    // Row j (1..=n): -lo v_{j-1} + d_j v_j - hi v_{j+1} = r_j² S_j.
    let mut diag = vec![0.0; n + 1];
    let mut sub = vec![0.0; n + 1];
    let mut sup = vec![0.0; n + 1];
    let mut b = vec![ZERO; n + 1];
    for j in 1..=n {
        let r = (j as f64 * h).exp();
        diag[j] = 2.0 / (h * h) + zeta * zeta * r * r + c;
        sub[j] = -lo;
        sup[j] = -hi;
        b[j] = rhs[j] * (r * r);
    }
    b[1] += inner * lo;
    // Ghost point from v_t + p v = 0: v_{n+1} = v_{n-1} − 2 h p v_n.
    sub[n] -= hi;
    diag[n] += hi * 2.0 * h * robin;
    sup[n] = 0.0;
    // Thomas algorithm on rows 1..=n.
    let mut cp = vec![0.0; n + 1];
    let mut dp = vec![ZERO; n + 1];
    for j in 1..=n {
        let m = diag[j] - if j > 1 { sub[j] * cp[j - 1] } else { 0.0 };
        if m == 0.0 || !m.is_finite() {
            return Err(Error::Numerical("singular finite-difference matrix".into()));
        }
        cp[j] = sup[j] / m;
        dp[j] = (b[j] - if j > 1 { dp[j - 1] * sub[j] } else { ZERO }) / m;
    }
    let mut v = vec![ZERO; n + 1];
    v[0] = inner;
    v[n] = dp[n];
    for j in (1..n).rev() {
        v[j] = dp[j] - v[j + 1] * cp[j];
    }
    Ok(v)
}

fn sample(rhs: &(dyn Fn(f64) -> Complex64 + Sync), r_out: f64, n: usize) -> Vec<Complex64> {
    let h = r_out.ln() / n as f64;
    (0..=n).map(|j| rhs((j as f64 * h).exp())).collect()
}

fn richardson(coarse: &[Complex64], fine: &[Complex64]) -> Vec<Complex64> {
    coarse.iter().enumerate().map(|(j, c)| (fine[2 * j] * 4.0 - c) / 3.0).collect()
}

fn check(p: &OracleProblem<'_>) -> Result<()> {
    if !(p.r_out > 1.0) || p.intervals < 8 || !(p.gamma > 2.0) {
        return Err(Error::Validation("oracle needs r_out > 1, at least 8 intervals and gamma > 2".into()));
    }
    Ok(())
}

/// Solve the boundary-value problem.
pub fn fd_oracle_mode(p: &OracleProblem<'_>) -> Result<OracleSolution> {
    check(p)?;
    let z = if p.zeta.abs() < crate::greens::ZETA_SWITCH { 0.0 } else { p.zeta };
    let level = |n: usize| -> Result<Vec<Complex64>> {
        let rhs = sample(p.rhs.as_ref(), p.r_out, n);
        solve_level(p.family, z, p.gamma, &rhs, p.inner, p.robin, p.r_out, n)
    };
    let coarse = level(p.intervals)?;
    let values = if p.richardson { richardson(&coarse, &level(2 * p.intervals)?) } else { coarse };
    Ok(OracleSolution { step: p.r_out.ln() / p.intervals as f64, values, robin: p.robin })
}

/// No-slip vorticity and its streamfunction, computed by finite differences
/// alone: `ω = ω_D + βH` with `H` the homogeneous solution, `H(1) = 1`, and `β`
/// chosen so that the streamfunction of `ω` has zero slope at `r = 1`.
#[derive(Debug, Clone)]
pub struct NoSlipOracle {
    pub omega: OracleSolution,
    pub psi: OracleSolution,
    pub beta: Complex64,
}

impl NoSlipOracle {
    /// `v_z = ψ/r + ψ' = (ψ + ψ_t)/r` on the oracle grid, with fourth-order
    /// differences in `t`.
    pub fn v_z(&self) -> OracleSolution {
        let v = &self.psi.values;
        let h = self.psi.step;
        let n = v.len();
        let values = (0..n)
            .map(|j| {
                let dt = if j >= 2 && j + 2 < n {
                    (v[j - 2] - v[j - 1] * 8.0 + v[j + 1] * 8.0 - v[j + 2]) / (12.0 * h)
                } else if j < 2 {
                    one_sided(&v[j..j + 5], h)
                } else {
                    let w: Vec<Complex64> = v[j - 4..=j].iter().rev().copied().collect();
                    -one_sided(&w, h)
                };
                (v[j] + dt) / self.psi.r(j)
            })
            .collect();
        OracleSolution { step: h, values, robin: self.psi.robin + 1.0 }
    }
}

fn one_sided(v: &[Complex64], h: f64) -> Complex64 {
    boundary_slope(v, h)
}

/// Vorticity oracle for the source `S(r)` (the curl of the force), with the
/// no-slip condition imposed through the streamfunction.
pub fn fd_noslip_vorticity(
    zeta: f64,
    gamma: f64,
    source: impl Fn(f64) -> Complex64 + Sync,
    r_out: f64,
    intervals: usize,
) -> Result<NoSlipOracle> {
    let z = if zeta.abs() < crate::greens::ZETA_SWITCH { 0.0 } else { zeta };
    let pv = source_robin(Family::Vorticity, gamma, z, r_out, &source);
    let ps = default_robin(Family::Stream, gamma, z, r_out);
    let one = Complex64::new(1.0, 0.0);
    let level = |n: usize| -> Result<(Vec<Complex64>, Vec<Complex64>, Complex64)> {
        let h = r_out.ln() / n as f64;
        let rhs = sample(&source, r_out, n);
        let zeros = vec![ZERO; n + 1];
        let wd = solve_level(Family::Vorticity, z, gamma, &rhs, ZERO, pv, r_out, n)?;
        let wh = solve_level(Family::Vorticity, z, gamma, &zeros, one, pv, r_out, n)?;
        let pd = solve_level(Family::Stream, z, gamma, &wd, ZERO, ps, r_out, n)?;
        let ph = solve_level(Family::Stream, z, gamma, &wh, ZERO, ps, r_out, n)?;
        let beta = -boundary_slope(&pd, h) / boundary_slope(&ph, h);
        let w = wd.iter().zip(&wh).map(|(a, b)| a + b * beta).collect();
        let p = pd.iter().zip(&ph).map(|(a, b)| a + b * beta).collect();
        Ok((w, p, beta))
    };
    let (w1, p1, b1) = level(intervals)?;
    let (w2, p2, b2) = level(2 * intervals)?;
    let step = r_out.ln() / intervals as f64;
    Ok(NoSlipOracle {
        omega: OracleSolution { step, values: richardson(&w1, &w2), robin: pv },
        psi: OracleSolution { step, values: richardson(&p1, &p2), robin: ps },
        beta: (b2 * 4.0 - b1) / 3.0,
    })
}
