use crate::error::{Error, Result};

/// Below this `|ζ|` every kernel switches to its `ζ = 0` branch.
pub const ZETA_SWITCH: f64 = 1e-6;

/// The three mode operators and their Green's kernels.
///
/// All three share the form `−v'' − (1+γ_e) v'/r + (ζ² + c/r²) v`, whose
/// homogeneous solutions are `r^{-γ_e/2} I_ν(|ζ|r)` and `r^{-γ_e/2} K_ν(|ζ|r)`
/// (powers `r^{-γ_e/2 ± ν}` at `ζ = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Family {
    /// `−ψ'' − ψ'/r + (ζ² + 1/r²) ψ`, kernels σ₁–σ₃.
    Stream,
    /// `−ω'' − (1+γ) ω'/r + (ζ² + (1+γ)/r²) ω`, kernels σ₄–σ₆.
    Vorticity,
    /// `−v'' − (1+γ) v'/r + (ζ² + (1−γ)/r²) v`, kernels σ₇–σ₉.
    Swirl,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Stream, Family::Vorticity, Family::Swirl];

    /// Coefficient `γ_e` of the first-order term beyond `1/r`.
    pub fn gamma_eff(self, gamma: f64) -> f64 {
        match self {
            Family::Stream => 0.0,
            _ => gamma,
        }
    }

    /// Coefficient `c` of `1/r²`.
    pub fn potential(self, gamma: f64) -> f64 {
        match self {
            Family::Stream => 1.0,
            Family::Vorticity => 1.0 + gamma,
            Family::Swirl => 1.0 - gamma,
        }
    }

    /// Half of `γ_e`.
    pub fn half_gamma(self, gamma: f64) -> f64 {
        0.5 * self.gamma_eff(gamma)
    }

    /// Bessel order `ν`.
    pub fn order(self, gamma: f64) -> f64 {
        let g = 0.5 * gamma;
        match self {
            Family::Stream => 1.0,
            Family::Vorticity => g + 1.0,
            Family::Swirl => (g - 1.0).abs(),
        }
    }

    /// Decay exponent of the decaying homogeneous solution at `ζ = 0`.
    pub fn zero_mode_decay(self, gamma: f64) -> f64 {
        self.half_gamma(gamma) + self.order(gamma)
    }

    /// Normalisation `p (u₁' u₂ − u₁ u₂')` of the `ζ = 0` kernels, `2ν`.
    pub fn zero_mode_wronskian(self, gamma: f64) -> f64 {
        2.0 * self.order(gamma)
    }
}

/// Suction strength and vertical frequency of one kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KernelParams {
    pub gamma: f64,
    pub zeta: f64,
}

impl KernelParams {
    pub fn new(gamma: f64, zeta: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 2.0) {
            return Err(Error::Validation(format!("gamma must exceed 2, got {gamma}")));
        }
        if !zeta.is_finite() {
            return Err(Error::Validation(format!("zeta must be finite, got {zeta}")));
        }
        Ok(Self { gamma, zeta })
    }

    pub fn is_zero_mode(&self) -> bool {
        self.zeta.abs() < ZETA_SWITCH
    }
}
