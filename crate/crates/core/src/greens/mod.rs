//! Green's kernels of the three mode operators and the functionals built on
//! them.

mod family;
mod kernels;
mod tables;

pub use family::{Family, KernelParams, ZETA_SWITCH};
pub use kernels::{c_coefficient, c_zero, capital_f, capital_f_scaled, d_coefficient, mn_integrands, sigma, ModeKind};
pub(crate) use kernels::d_with_table;
pub use tables::{GreenIntegrals, GridQuadrature, ModeTable, ModeValues, Source, GAUSS_POINTS};
