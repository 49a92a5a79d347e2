//! Steady axisymmetric Navier–Stokes flow past a cylinder with radial
//! suction `V = −(γ/r) e_r`, solved mode by mode.
//!
//! Each vertical Fourier mode of the perturbation is obtained from Green's
//! kernels built on modified Bessel functions: swirl first, then azimuthal
//! vorticity with its free constant fixed by the no-slip condition, then the
//! streamfunction and the axisymmetric Biot–Savart law. The nonlinear problem
//! is solved by Picard iteration, and an independent finite-difference oracle
//! checks the mode solutions.

pub mod config;
pub mod error;
pub mod function_spaces;
pub mod greens;
pub mod quadrature;
pub mod solver;
pub mod specfun;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
pub use num_complex::Complex64;
