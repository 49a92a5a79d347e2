use super::grid::RadialGrid;
use super::measure::SpectralMeasure;
use crate::error::Result;
use num_complex::Complex64;
use std::sync::Arc;

/// Cylindrical components `(r, θ, z)` of an axisymmetric vector field, each
/// stored as a spectral measure in `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiVectorField {
    pub comp_r: SpectralMeasure,
    pub comp_theta: SpectralMeasure,
    pub comp_z: SpectralMeasure,
}

impl AxiVectorField {
    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        Self {
            comp_r: SpectralMeasure::zero(grid.clone()),
            comp_theta: SpectralMeasure::zero(grid.clone()),
            comp_z: SpectralMeasure::zero(grid),
        }
    }

    pub fn new(comp_r: SpectralMeasure, comp_theta: SpectralMeasure, comp_z: SpectralMeasure) -> Self {
        Self { comp_r, comp_theta, comp_z }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.comp_r.grid()
    }

    pub fn components(&self) -> [&SpectralMeasure; 3] {
        [&self.comp_r, &self.comp_theta, &self.comp_z]
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            comp_r: self.comp_r.add(&other.comp_r)?,
            comp_theta: self.comp_theta.add(&other.comp_theta)?,
            comp_z: self.comp_z.add(&other.comp_z)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { comp_r: self.comp_r.scale(c), comp_theta: self.comp_theta.scale(c), comp_z: self.comp_z.scale(c) }
    }

    /// `Σ_components ‖·‖_{X(L∞_ρ)}`, the norm of `FX(L∞_ρ)³`.
    pub fn fx_norm(&self, rho: f64) -> f64 {
        self.components().iter().map(|c| c.x_norm(rho)).sum()
    }

    /// Physical components at `(r, z)`.
    pub fn reconstruct(&self, r: f64, z: f64) -> Result<[Complex64; 3]> {
        Ok([self.comp_r.reconstruct(r, z)?, self.comp_theta.reconstruct(r, z)?, self.comp_z.reconstruct(r, z)?])
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.components().iter().all(|c| c.is_hermitian(tol))
    }
}
