#ifndef AXISYM_SUCTION_H
#define AXISYM_SUCTION_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AXI_OK 0

#define AXI_ERR_NULL 1

#define AXI_ERR_VALIDATION 2

#define AXI_ERR_NONCONVERGENCE 3

#define AXI_ERR_NUMERICAL 4

#define AXI_ERR_PANIC 5

#define AXI_COMPONENT_R 0

#define AXI_COMPONENT_THETA 1

#define AXI_COMPONENT_Z 2

/**
 * Real force field under construction.
 */
typedef struct AxiForce AxiForce;

/**
 * Velocity field.
 */
typedef struct AxiSolution AxiSolution;

/**
 * Linear solver with its kernel cache.
 */
typedef struct AxiSolver AxiSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *axi_last_error_message(void);

/**
 * `I_ν(x)` and `K_ν(x)`, exponentially scaled when `scaled != 0`.
 *
 * # Safety
 * `i_out` and `k_out` must be valid for writes.
 */
int32_t axi_bessel(double nu, double x, int32_t scaled, double *i_out, double *k_out);

/**
 * Kernel entry `σ_index(r, s)` at vertical frequency `zeta`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
int32_t axi_kernel(uint8_t index, double r, double s, double zeta, double gamma, double *out);

/**
 * Solver on a geometric grid of `nodes` points over `[1, r_max]`. Returns
 * null on failure.
 */
AxiSolver *axi_solver_new(double gamma, double alpha, size_t nodes, double r_max);

/**
 * # Safety
 * `solver` must come from [`axi_solver_new`] and not be used afterwards.
 */
void axi_solver_free(AxiSolver *solver);

/**
 * Zero force on the grid of `solver`. Returns null on failure.
 *
 * # Safety
 * `solver` must be a live handle.
 */
AxiForce *axi_force_new(const AxiSolver *solver);

/**
 * Add `(amp_re + i amp_im) r^{-exponent} e^{imz}` to one component; the
 * conjugate term at `−m` is added so the field stays real.
 *
 * # Safety
 * `force` must be a live handle.
 */
int32_t axi_force_add_powerlaw(AxiForce *force,
                               int32_t component,
                               int64_t m,
                               double amp_re,
                               double amp_im,
                               double exponent);

/**
 * # Safety
 * `force` must come from [`axi_force_new`] and not be used afterwards.
 */
void axi_force_free(AxiForce *force);

/**
 * Linear solve; `*out` receives a new solution handle.
 *
 * # Safety
 * `solver` and `force` must be live handles, `out` valid for writes.
 */
int32_t axi_solve_linear(const AxiSolver *solver, const AxiForce *force, AxiSolution **out);

/**
 * Picard iteration with weight exponent `rho`; `*out` receives a new
 * solution handle.
 *
 * # Safety
 * `solver` and `force` must be live handles, `out` valid for writes.
 */
int32_t axi_solve_nonlinear(const AxiSolver *solver,
                            const AxiForce *force,
                            double rho,
                            size_t max_iter,
                            double tol,
                            AxiSolution **out);

/**
 * Real velocity `(v_r, v_θ, v_z)` at `(r, z)` into `out[0..3]`.
 *
 * # Safety
 * `solution` must be a live handle, `out` valid for three writes.
 */
int32_t axi_solution_eval(const AxiSolution *solution, double r, double z, double *out);

/**
 * Picard iterations used, 0 for a linear solution.
 *
 * # Safety
 * `solution` must be a live handle or null.
 */
size_t axi_solution_iterations(const AxiSolution *solution);

/**
 * # Safety
 * `solution` must come from a solve call and not be used afterwards.
 */
void axi_solution_free(AxiSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AXISYM_SUCTION_H */
