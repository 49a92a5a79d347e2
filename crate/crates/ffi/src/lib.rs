//! C ABI for the axisym-suction solver.
//!
//! Objects are opaque heap handles released by their `_free` function. Every
//! fallible call returns a status code; on failure the message is available
//! from [`axi_last_error_message`] on the same thread.

use axisym_suction::config::{Component, FlowConfig, ForceSpec, ForceTerm, ModeSpec, RadialSpec};
use axisym_suction::function_spaces::{AxiVectorField, RadialGrid};
use axisym_suction::greens::{sigma, KernelParams};
use axisym_suction::solver::{picard_solve_with, LinearSolver};
use axisym_suction::specfun::bessel_eval;
use axisym_suction::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

pub const AXI_OK: i32 = 0;
pub const AXI_ERR_NULL: i32 = 1;
pub const AXI_ERR_VALIDATION: i32 = 2;
pub const AXI_ERR_NONCONVERGENCE: i32 = 3;
pub const AXI_ERR_NUMERICAL: i32 = 4;
pub const AXI_ERR_PANIC: i32 = 5;

pub const AXI_COMPONENT_R: i32 = 0;
pub const AXI_COMPONENT_THETA: i32 = 1;
pub const AXI_COMPONENT_Z: i32 = 2;

/// Linear solver with its kernel cache.
pub struct AxiSolver {
    inner: LinearSolver,
}

/// Real force field under construction.
pub struct AxiForce {
    grid: Arc<RadialGrid>,
    spec: ForceSpec,
}

/// Velocity field.
pub struct AxiSolution {
    v: AxiVectorField,
    iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> i32 {
    match e.exit_code() {
        2 => AXI_ERR_VALIDATION,
        3 => AXI_ERR_NONCONVERGENCE,
        _ => AXI_ERR_NUMERICAL,
    }
}

fn guard(f: impl FnOnce() -> Result<(), i32>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AXI_OK,
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("internal panic");
            AXI_ERR_PANIC
        }
    }
}

fn fail(e: Error) -> i32 {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> i32 {
    set_error(&format!("null pointer: {what}"));
    AXI_ERR_NULL
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn axi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `I_ν(x)` and `K_ν(x)`, exponentially scaled when `scaled != 0`.
///
/// # Safety
/// `i_out` and `k_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn axi_bessel(nu: f64, x: f64, scaled: i32, i_out: *mut f64, k_out: *mut f64) -> i32 {
    guard(|| {
        if i_out.is_null() || k_out.is_null() {
            return Err(null("output"));
        }
        let b = bessel_eval(nu, x, scaled != 0).map_err(fail)?;
        *i_out = b.value_i;
        *k_out = b.value_k;
        Ok(())
    })
}

/// Kernel entry `σ_index(r, s)` at vertical frequency `zeta`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn axi_kernel(index: u8, r: f64, s: f64, zeta: f64, gamma: f64, out: *mut f64) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("output"));
        }
        let p = KernelParams::new(gamma, zeta).map_err(fail)?;
        *out = sigma(index, r, s, &p).map_err(fail)?;
        Ok(())
    })
}

/// Solver on a geometric grid of `nodes` points over `[1, r_max]`. Returns
/// null on failure.
#[no_mangle]
pub extern "C" fn axi_solver_new(gamma: f64, alpha: f64, nodes: usize, r_max: f64) -> *mut AxiSolver {
    let mut out = ptr::null_mut();
    guard(|| {
        let grid = Arc::new(RadialGrid::geometric(nodes, r_max).map_err(fail)?);
        let inner = LinearSolver::new(gamma, alpha, grid).map_err(fail)?;
        out = Box::into_raw(Box::new(AxiSolver { inner }));
        Ok(())
    });
    out
}

/// # Safety
/// `solver` must come from [`axi_solver_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn axi_solver_free(solver: *mut AxiSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Zero force on the grid of `solver`. Returns null on failure.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn axi_force_new(solver: *const AxiSolver) -> *mut AxiForce {
    let Some(s) = solver.as_ref() else {
        null("solver");
        return ptr::null_mut();
    };
    Box::into_raw(Box::new(AxiForce { grid: s.inner.grid().clone(), spec: ForceSpec::default() }))
}

/// Add `(amp_re + i amp_im) r^{-exponent} e^{imz}` to one component; the
/// conjugate term at `−m` is added so the field stays real.
///
/// # Safety
/// `force` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn axi_force_add_powerlaw(
    force: *mut AxiForce,
    component: i32,
    m: i64,
    amp_re: f64,
    amp_im: f64,
    exponent: f64,
) -> i32 {
    guard(|| {
        let Some(f) = force.as_mut() else { return Err(null("force")) };
        let component = match component {
            AXI_COMPONENT_R => Component::R,
            AXI_COMPONENT_THETA => Component::Theta,
            AXI_COMPONENT_Z => Component::Z,
            c => return Err(fail(Error::Validation(format!("unknown component {c}")))),
        };
        if !(exponent.is_finite() && amp_re.is_finite() && amp_im.is_finite()) {
            return Err(fail(Error::Validation("non-finite force parameter".into())));
        }
        f.spec.terms.push(ForceTerm {
            component,
            mode: ModeSpec::Atom { m },
            radial: RadialSpec::Powerlaw { amplitude: amp_re, amplitude_im: amp_im, exponent },
        });
        Ok(())
    })
}

/// # Safety
/// `force` must come from [`axi_force_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn axi_force_free(force: *mut AxiForce) {
    if !force.is_null() {
        drop(Box::from_raw(force));
    }
}

fn build(s: &AxiSolver, f: &AxiForce) -> Result<AxiVectorField, i32> {
    if !Arc::ptr_eq(s.inner.grid(), &f.grid) && **s.inner.grid() != *f.grid {
        return Err(fail(Error::GridMismatch("force was created for another solver".into())));
    }
    f.spec.build(&f.grid, None).map_err(fail)
}

/// Linear solve; `*out` receives a new solution handle.
///
/// # Safety
/// `solver` and `force` must be live handles, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn axi_solve_linear(
    solver: *const AxiSolver,
    force: *const AxiForce,
    out: *mut *mut AxiSolution,
) -> i32 {
    guard(|| {
        let (Some(s), Some(f)) = (solver.as_ref(), force.as_ref()) else { return Err(null("solver or force")) };
        if out.is_null() {
            return Err(null("output"));
        }
        let field = build(s, f)?;
        let v = s.inner.solve(&field).map_err(fail)?.v;
        *out = Box::into_raw(Box::new(AxiSolution { v, iterations: 0 }));
        Ok(())
    })
}

/// Picard iteration with weight exponent `rho`; `*out` receives a new
/// solution handle.
///
/// # Safety
/// `solver` and `force` must be live handles, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn axi_solve_nonlinear(
    solver: *const AxiSolver,
    force: *const AxiForce,
    rho: f64,
    max_iter: usize,
    tol: f64,
    out: *mut *mut AxiSolution,
) -> i32 {
    guard(|| {
        let (Some(s), Some(f)) = (solver.as_ref(), force.as_ref()) else { return Err(null("solver or force")) };
        if out.is_null() {
            return Err(null("output"));
        }
        let mut cfg = FlowConfig::new(s.inner.gamma());
        cfg.alpha = s.inner.alpha();
        cfg.rho = rho;
        cfg.picard.max_iter = max_iter;
        cfg.picard.tol_fx = tol;
        cfg.validate().map_err(fail)?;
        f.spec.validate(rho).map_err(fail)?;
        let field = build(s, f)?;
        let nl = picard_solve_with(&s.inner, &field, &cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(AxiSolution { iterations: nl.iterations(), v: nl.v }));
        Ok(())
    })
}

/// Real velocity `(v_r, v_θ, v_z)` at `(r, z)` into `out[0..3]`.
///
/// # Safety
/// `solution` must be a live handle, `out` valid for three writes.
#[no_mangle]
pub unsafe extern "C" fn axi_solution_eval(solution: *const AxiSolution, r: f64, z: f64, out: *mut f64) -> i32 {
    guard(|| {
        let Some(s) = solution.as_ref() else { return Err(null("solution")) };
        if out.is_null() {
            return Err(null("output"));
        }
        let v = s.v.reconstruct(r, z).map_err(fail)?;
        for (j, c) in v.iter().enumerate() {
            *out.add(j) = c.re;
        }
        Ok(())
    })
}

/// Picard iterations used, 0 for a linear solution.
///
/// # Safety
/// `solution` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn axi_solution_iterations(solution: *const AxiSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.iterations)
}

/// # Safety
/// `solution` must come from a solve call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn axi_solution_free(solution: *mut AxiSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
