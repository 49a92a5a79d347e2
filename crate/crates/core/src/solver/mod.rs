//! Mode solvers, the linearized problem and the Picard iteration.

mod linear;
mod modes;
mod nonlinear;

pub use linear::{solve_lp, LinearSolution, LinearSolver};
pub use modes::{
    biot_savart_mode, response_tail, solve_mode, solve_stream_mode, solve_swirl_mode, solve_vorticity_mode,
    BoundaryDefects, ModeOperator, ModeSolution, VorticityParts,
};
pub use nonlinear::{
    nonlinear_force, nonlinear_force_with, picard_solve, picard_solve_with, NonlinearSolution, PicardSummary,
};
