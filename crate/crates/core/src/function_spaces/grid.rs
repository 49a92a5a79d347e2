use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Geometrically graded nodes `r_i = R_max^{i/(N-1)}` on `[1, R_max]`.
///
/// The grid is uniform in `t = ln r`, which resolves the wall layer at `r = 1`
/// and the algebraic tail with the same number of points per decade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    step: f64,
}

pub const MIN_NODES: usize = 64;
pub const DEFAULT_NODES: usize = 512;
pub const DEFAULT_R_MAX: f64 = 1000.0;

impl RadialGrid {
    pub fn geometric(n: usize, r_max: f64) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Validation(format!("radial grid needs at least {MIN_NODES} nodes, got {n}")));
        }
        if !(r_max.is_finite() && r_max > 1.0) {
            return Err(Error::Validation(format!("r_max must exceed 1, got {r_max}")));
        }
        let step = r_max.ln() / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| (i as f64 * step).exp()).collect();
        nodes[0] = 1.0;
        nodes[n - 1] = r_max;
        Ok(Self { nodes, step })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform spacing in `ln r`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Ratio between consecutive nodes.
    pub fn stretch(&self) -> f64 {
        self.step.exp()
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Panel index `i` and fractional position `θ ∈ [0, 1]` in `ln r` such that
    /// `r` lies in `[r_i, r_{i+1}]`.
    pub fn locate(&self, r: f64) -> Result<(usize, f64)> {
        let rmax = self.r_max();
        if !(r >= 1.0 - 1e-14 && r <= rmax * (1.0 + 1e-14)) {
            return Err(Error::OutOfGrid(format!("r = {r} outside [1, {rmax}]")));
        }
        let x = r.max(1.0).ln() / self.step;
        let i = (x.floor() as usize).min(self.len() - 2);
        Ok((i, (x - i as f64).clamp(0.0, 1.0)))
    }

    /// Lagrange weights of an `order`-point stencil in `ln r`, centred on the
    /// panel `i` and shifted inwards at the ends. Returns the first stencil
    /// index and the weights.
    pub fn lagrange(&self, i: usize, theta: f64, order: usize) -> (usize, Vec<f64>) {
        let n = self.len();
        let start = (i + 1).saturating_sub(order / 2).min(n - order);
        let x = (i - start) as f64 + theta;
        let w = (0..order)
            .map(|j| {
                let mut p = 1.0;
                for l in 0..order {
                    if l != j {
                        p *= (x - l as f64) / (j as f64 - l as f64);
                    }
                }
                p
            })
            .collect();
        (start, w)
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self::geometric(DEFAULT_NODES, DEFAULT_R_MAX).expect("default grid is valid")
    }
}

/// Uniform symmetric grid on `[-Z, Z]` with trapezoid weights, used for the
/// continuous part of a spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

pub const DEFAULT_Z_MAX: f64 = 16.0;
pub const DEFAULT_ZETA_NODES: usize = 257;

impl ZetaGrid {
    /// `n` must be odd so that `ζ = 0` is a node and the grid is symmetric.
    pub fn uniform(z_max: f64, n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::Validation(format!("zeta grid needs an odd node count >= 3, got {n}")));
        }
        if !(z_max.is_finite() && z_max > 0.0) {
            return Err(Error::Validation(format!("z_max must be positive, got {z_max}")));
        }
        let c = (n - 1) / 2;
        let dz = z_max / c as f64;
        let nodes: Vec<f64> = (0..n).map(|j| (j as f64 - c as f64) * dz).collect();
        let mut weights = vec![dz; n];
        weights[0] = 0.5 * dz;
        weights[n - 1] = 0.5 * dz;
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    pub fn z_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index of the node `-ζ_j`.
    pub fn mirror(&self, j: usize) -> usize {
        self.len() - 1 - j
    }

    /// Linear interpolation position: `(j, λ)` with `ζ = (1-λ) ζ_j + λ ζ_{j+1}`,
    /// or `None` outside the grid.
    pub fn locate(&self, zeta: f64) -> Option<(usize, f64)> {
        let x = (zeta - self.nodes[0]) / self.spacing();
        let last = (self.len() - 1) as f64;
        if x < -1e-9 || x > last + 1e-9 {
            return None;
        }
        let x = x.clamp(0.0, last);
        let j = (x.floor() as usize).min(self.len() - 2);
        let lam = x - j as f64;
        // Snap to nodes when the offset is rounding noise.
        if lam < 1e-9 {
            Some((j, 0.0))
        } else if lam > 1.0 - 1e-9 {
            Some((j + 1, 0.0))
        } else {
            Some((j, lam))
        }
    }
}

impl Default for ZetaGrid {
    fn default() -> Self {
        Self::uniform(DEFAULT_Z_MAX, DEFAULT_ZETA_NODES).expect("default zeta grid is valid")
    }
}
