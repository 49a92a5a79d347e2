//! Radial grids and profiles, the weighted spaces `L∞_ρ`, and measures of the
//! form `g dζ + Σ a_m δ_m` with their norm, convolution and reconstruction.

mod field;
mod grid;
pub mod io;
mod measure;
mod profile;

pub use field::AxiVectorField;
pub use grid::{RadialGrid, ZetaGrid, DEFAULT_NODES, DEFAULT_R_MAX, DEFAULT_ZETA_NODES, DEFAULT_Z_MAX, MIN_NODES};
pub use measure::{ModeKey, SpectralMeasure};
pub use profile::RadialProfile;

use num_complex::Complex64;

/// `sup_r r^ρ |p(r)|` with the tail model beyond the grid.
pub fn weighted_sup_norm(p: &RadialProfile, rho: f64) -> f64 {
    p.weighted_sup_norm(rho)
}

/// `X(L∞_ρ)` norm of a measure.
pub fn x_norm(mu: &SpectralMeasure, rho: f64) -> f64 {
    mu.x_norm(rho)
}

pub fn convolve(a: &SpectralMeasure, b: &SpectralMeasure) -> crate::Result<SpectralMeasure> {
    a.convolve(b)
}

pub fn z_derivative(mu: &SpectralMeasure) -> SpectralMeasure {
    mu.z_derivative()
}

pub fn reconstruct(mu: &SpectralMeasure, r: f64, z: f64) -> crate::Result<Complex64> {
    mu.reconstruct(r, z)
}
