/* C interface to the annulus-bem boundary element solver. */

#ifndef ANNULUS_BEM_H
#define ANNULUS_BEM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum AbStatus {
  AbOk = 0,
  AbNullPointer = 1,
  AbInvalidArgument = 2,
  AbGeometryError = 3,
  AbDataError = 4,
  AbNumericalError = 5,
  AbNotInterior = 6,
} AbStatus;

/**
 * Opaque discretized annular boundary.
 */
typedef struct AbMesh AbMesh;

/**
 * Opaque boundary solution (potentials and fluxes on every element).
 */
typedef struct AbSolution AbSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of the underlying solver; static storage, do not free.
 */
const char *ab_version(void);

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes excluding
 * the terminator. `buf` may be null to query the length.
 *
 * # Safety
 * `buf`, when non-null, must point to `len` writable bytes.
 */
uintptr_t ab_last_error_message(char *buf, uintptr_t len);

/**
 * Build an annular mesh: outer loop counter-clockwise, inner clockwise,
 * element ordering outer-first. On success `*out` owns the mesh.
 *
 * # Safety
 * `out` must be a valid pointer to an `AbMesh*` slot.
 */
enum AbStatus ab_mesh_build(double outer_center_x,
                            double outer_center_y,
                            double outer_radius,
                            double inner_center_x,
                            double inner_center_y,
                            double inner_radius,
                            uintptr_t n_outer,
                            uintptr_t n_inner,
                            struct AbMesh **out);

/**
 * # Safety
 * `mesh` must be null or a pointer returned by [`ab_mesh_build`] that has
 * not been freed yet.
 */
void ab_mesh_free(struct AbMesh *mesh);

/**
 * Total element count (outer + inner), 0 for null.
 *
 * # Safety
 * `mesh` must be null or a live mesh handle.
 */
uintptr_t ab_mesh_element_count(const struct AbMesh *mesh);

/**
 * Write the collocation midpoints as interleaved `x0,y0,x1,y1,...`;
 * `len` must be exactly `2 * element_count`.
 *
 * # Safety
 * `mesh` must be a live mesh handle and `xy` must point to `len` writable
 * doubles.
 */
enum AbStatus ab_mesh_midpoints(const struct AbMesh *mesh, double *xy, uintptr_t len);

/**
 * Solve for the Neumann data given Dirichlet potentials on every element
 * (element order, `len` equal to the element count). On success `*out`
 * owns the solution.
 *
 * # Safety
 * `mesh` must be a live mesh handle, `potentials` must point to `len`
 * readable doubles, and `out` must be a valid `AbSolution*` slot.
 */
enum AbStatus ab_solve_dirichlet(const struct AbMesh *mesh,
                                 const double *potentials,
                                 uintptr_t len,
                                 struct AbSolution **out);

/**
 * # Safety
 * `solution` must be null or a pointer returned by a solve call that has
 * not been freed yet.
 */
void ab_solution_free(struct AbSolution *solution);

/**
 * Element count of the solution, 0 for null.
 *
 * # Safety
 * `solution` must be null or a live solution handle.
 */
uintptr_t ab_solution_size(const struct AbSolution *solution);

/**
 * Copy the per-element potentials; `len` must equal the solution size.
 *
 * # Safety
 * `solution` must be a live handle; `out` must point to `len` writable
 * doubles.
 */
enum AbStatus ab_solution_potentials(const struct AbSolution *solution, double *out, uintptr_t len);

/**
 * Copy the per-element outward normal derivatives; `len` must equal the
 * solution size.
 *
 * # Safety
 * `solution` must be a live handle; `out` must point to `len` writable
 * doubles.
 */
enum AbStatus ab_solution_fluxes(const struct AbSolution *solution, double *out, uintptr_t len);

/**
 * Infinity-norm residual of the collocation solve; NaN for null.
 *
 * # Safety
 * `solution` must be null or a live solution handle.
 */
double ab_solution_residual_norm(const struct AbSolution *solution);

/**
 * 1-norm condition estimate of the solve; NaN for null.
 *
 * # Safety
 * `solution` must be null or a live solution handle.
 */
double ab_solution_condition_estimate(const struct AbSolution *solution);

/**
 * Classify a point against the mesh: 0 exterior, 1 on the boundary,
 * 2 interior. Uses the mesh's default boundary tolerance.
 *
 * # Safety
 * `mesh` must be a live mesh handle; `out_class` must be writable.
 */
enum AbStatus ab_classify_point(const struct AbMesh *mesh, double x, double y, int *out_class);

/**
 * Evaluate the solved potential at an interior point.
 *
 * # Safety
 * `solution` must be a live solution handle; `out_value` must be writable.
 */
enum AbStatus ab_eval_interior(const struct AbSolution *solution,
                               double x,
                               double y,
                               double *out_value);

/**
 * Serialize the solution to the versioned text format. Same buffer protocol
 * as [`ab_last_error_message`]: returns the full length, copies up to
 * `len - 1` bytes plus a NUL.
 *
 * # Safety
 * `solution` must be a live handle; `buf`, when non-null, must point to
 * `len` writable bytes.
 */
uintptr_t ab_solution_serialize(const struct AbSolution *solution, char *buf, uintptr_t len);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ANNULUS_BEM_H */
