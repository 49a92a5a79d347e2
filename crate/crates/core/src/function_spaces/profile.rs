use super::grid::RadialGrid;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Tolerance when comparing a tail exponent against a weight exponent.
const TAIL_SLACK: f64 = 1e-9;

/// Complex samples of a function of `r` on a [`RadialGrid`].
///
/// Beyond `R_max` the profile is modelled as `v(R_max) (r/R_max)^{-p}` with
/// `p = tail_exponent`; `+∞` marks a profile that vanishes identically past
/// the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
    tail_exponent: f64,
}

impl RadialProfile {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<Complex64>, tail_exponent: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Numerical("profile contains non-finite values".into()));
        }
        if tail_exponent.is_nan() {
            return Err(Error::Validation("tail exponent is NaN".into()));
        }
        Ok(Self { grid, values, tail_exponent })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![Complex64::new(0.0, 0.0); n], tail_exponent: f64::INFINITY }
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Arc<RadialGrid>, f: F, tail_exponent: f64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, values, tail_exponent }
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F, tail_exponent: f64) -> Self {
        Self::from_fn(grid, |r| Complex64::new(f(r), 0.0), tail_exponent)
    }

    /// `amplitude · r^{-exponent}` with a matching tail.
    pub fn power_law(grid: Arc<RadialGrid>, amplitude: Complex64, exponent: f64) -> Self {
        Self::from_fn(grid, |r| amplitude * r.powf(-exponent), exponent)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn tail_exponent(&self) -> f64 {
        self.tail_exponent
    }

    pub fn with_tail(mut self, tail_exponent: f64) -> Self {
        self.tail_exponent = tail_exponent;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &RadialProfile) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch("profiles live on different radial grids".into()))
        }
    }

    /// Cubic interpolation in `ln r`; errors outside `[1, R_max]`.
    pub fn eval(&self, r: f64) -> Result<Complex64> {
        self.eval_order(r, 4)
    }

    /// Interpolation with an `order`-point Lagrange stencil in `ln r`.
    pub fn eval_order(&self, r: f64, order: usize) -> Result<Complex64> {
        let (i, theta) = self.grid.locate(r)?;
        let (start, w) = self.grid.lagrange(i, theta, order);
        Ok(w.iter().enumerate().map(|(j, wj)| self.values[start + j] * *wj).sum())
    }

    /// Value anywhere on `[1, ∞)`, using the tail model beyond the grid.
    pub fn eval_extended(&self, r: f64) -> Result<Complex64> {
        let rmax = self.grid.r_max();
        if r <= rmax {
            return self.eval(r);
        }
        let last = self.values[self.values.len() - 1];
        if self.tail_exponent.is_infinite() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(last * (r / rmax).powf(-self.tail_exponent))
    }

    /// Scaling by zero gives the zero profile (infinite tail exponent).
    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self::zeros(self.grid.clone());
        }
        let values = self.values.iter().map(|v| v * c).collect();
        Self { grid: self.grid.clone(), values, tail_exponent: self.tail_exponent }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn conj(&self) -> Self {
        let values = self.values.iter().map(|v| v.conj()).collect();
        Self { grid: self.grid.clone(), values, tail_exponent: self.tail_exponent }
    }

    pub fn add(&self, other: &RadialProfile) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid.clone(), values, tail_exponent: self.tail_exponent.min(other.tail_exponent) })
    }

    pub fn sub(&self, other: &RadialProfile) -> Result<Self> {
        self.add(&other.scale_real(-1.0))
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: Complex64, other: &RadialProfile) -> Result<Self> {
        self.add(&other.scale(c))
    }

    /// Pointwise product; tail exponents add.
    pub fn mul(&self, other: &RadialProfile) -> Result<Self> {
        self.same_grid(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zeros(self.grid.clone()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid.clone(), values, tail_exponent: self.tail_exponent + other.tail_exponent })
    }

    /// Multiply by `r^{-k}`.
    pub fn div_r_pow(&self, k: f64) -> Self {
        let values = self.values.iter().zip(self.grid.nodes()).map(|(v, r)| v * r.powf(-k)).collect();
        Self { grid: self.grid.clone(), values, tail_exponent: self.tail_exponent + k }
    }

    /// Linear combination `(1-λ) a + λ b`.
    pub fn lerp(a: &RadialProfile, b: &RadialProfile, lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            return Ok(a.clone());
        }
        a.same_grid(b)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x * (1.0 - lambda) + y * lambda).collect();
        Ok(Self { grid: a.grid.clone(), values, tail_exponent: a.tail_exponent.min(b.tail_exponent) })
    }

    /// `d/dr` by 4th-order differences in `ln r` (one-sided at both ends).
    pub fn d_dr(&self) -> Self {
        let ft = diff_t(&self.values, self.grid.step());
        let values = ft.iter().zip(self.grid.nodes()).map(|(d, r)| d / r).collect();
        Self { grid: self.grid.clone(), values, tail_exponent: self.tail_exponent + 1.0 }
    }

    /// `d²/dr²` by 4th-order differences in `ln r`.
    pub fn d2_dr2(&self) -> Self {
        let h = self.grid.step();
        let ft = diff_t(&self.values, h);
        let ftt = diff2_t(&self.values, h);
        let values = ft
            .iter()
            .zip(&ftt)
            .zip(self.grid.nodes())
            .map(|((d1, d2), r)| (d2 - d1) / (r * r))
            .collect();
        Self { grid: self.grid.clone(), values, tail_exponent: self.tail_exponent + 2.0 }
    }

    /// `sup_r r^ρ |v(r)|`, extended by the tail model; `+∞` when the tail
    /// decays slower than `r^{-ρ}`.
    pub fn weighted_sup_norm(&self, rho: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let last = self.values[self.values.len() - 1];
        if self.tail_exponent < rho - TAIL_SLACK && last.norm() > 0.0 {
            return f64::INFINITY;
        }
        let nodes = self.grid.nodes();
        let (imax, mut best) = self
            .values
            .iter()
            .zip(nodes)
            .map(|(v, r)| r.powf(rho) * v.norm())
            .enumerate()
            .fold((0, 0.0), |acc, (i, w)| if w > acc.1 { (i, w) } else { acc });
        // Refine between the neighbouring nodes on the cubic interpolant of
        // the weighted values, which is exact for pure power laws.
        let lo = nodes[imax.saturating_sub(1)];
        let hi = nodes[(imax + 1).min(nodes.len() - 1)];
        const SUB: usize = 64;
        for k in 1..SUB {
            let r = lo * (hi / lo).powf(k as f64 / SUB as f64);
            if let Ok((i, theta)) = self.grid.locate(r) {
                let (start, w) = self.grid.lagrange(i, theta, 4);
                let v: Complex64 =
                    w.iter().enumerate().map(|(j, wj)| self.values[start + j] * nodes[start + j].powf(rho) * *wj).sum();
                best = best.max(v.norm());
            }
        }
        best
    }
}

/// 4th-order first derivative on a uniform grid.
pub(crate) fn diff_t(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let c = 1.0 / (12.0 * h);
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                f[i - 2] - f[i - 1] * 8.0 + f[i + 1] * 8.0 - f[i + 2]
            } else if i == 0 {
                f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0
            } else if i == 1 {
                f[0] * -3.0 - f[1] * 10.0 + f[2] * 18.0 - f[3] * 6.0 + f[4]
            } else if i == n - 2 {
                -(f[n - 1] * -3.0 - f[n - 2] * 10.0 + f[n - 3] * 18.0 - f[n - 4] * 6.0 + f[n - 5])
            } else {
                -(f[n - 1] * -25.0 + f[n - 2] * 48.0 - f[n - 3] * 36.0 + f[n - 4] * 16.0 - f[n - 5] * 3.0)
            };
            d * c
        })
        .collect()
}

/// 4th-order second derivative on a uniform grid.
pub(crate) fn diff2_t(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let c = 1.0 / (12.0 * h * h);
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                -f[i - 2] + f[i - 1] * 16.0 - f[i] * 30.0 + f[i + 1] * 16.0 - f[i + 2]
            } else if i == 0 {
                f[0] * 45.0 - f[1] * 154.0 + f[2] * 214.0 - f[3] * 156.0 + f[4] * 61.0 - f[5] * 10.0
            } else if i == 1 {
                f[0] * 10.0 - f[1] * 15.0 - f[2] * 4.0 + f[3] * 14.0 - f[4] * 6.0 + f[5]
            } else if i == n - 2 {
                f[n - 1] * 10.0 - f[n - 2] * 15.0 - f[n - 3] * 4.0 + f[n - 4] * 14.0 - f[n - 5] * 6.0 + f[n - 6]
            } else {
                f[n - 1] * 45.0 - f[n - 2] * 154.0 + f[n - 3] * 214.0 - f[n - 4] * 156.0 + f[n - 5] * 61.0
                    - f[n - 6] * 10.0
            };
            d * c
        })
        .collect()
}
