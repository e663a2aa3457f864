#ifndef DIRAC21_H
#define DIRAC21_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes. `D21_STATUS_OK` is zero; every other value is an error.
 */
typedef enum D21Status {
  D21_STATUS_OK = 0,
  D21_STATUS_NULL_POINTER = 1,
  D21_STATUS_INVALID_UTF8 = 2,
  D21_STATUS_DOMAIN = 3,
  D21_STATUS_INCONSISTENT = 4,
  D21_STATUS_SINGULAR_FRAME = 5,
  D21_STATUS_NOT_ANTISYMMETRIC = 6,
  D21_STATUS_INADMISSIBLE_POTENTIAL = 7,
  D21_STATUS_SINGULAR_INTERVAL = 8,
  D21_STATUS_STEP_UNDERFLOW = 9,
  D21_STATUS_OUTSIDE_RANGE = 10,
  D21_STATUS_CONFIG = 11,
  D21_STATUS_IO = 12,
  D21_STATUS_PANIC = 13,
} D21Status;

/*
 Opaque chart of flat (2+1) spacetime.
 */
typedef struct D21Chart D21Chart;

/*
 Opaque gamma-matrix representation.
 */
typedef struct D21GammaRep D21GammaRep;

/*
 Opaque result of a separation run: trajectory, reconstructed field and
 residual report.
 */
typedef struct D21Solution D21Solution;

/*
 Complex number with the layout of C `double _Complex`.
 */
typedef struct D21Complex {
  double re;
  double im;
} D21Complex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *d21_version(void);

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length without the NUL, or
 0 when there is no error.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t d21_last_error(char *buf, size_t len);

/*
 Creates the representation for s = +1 or −1.

 # Safety
 `out` must be a valid pointer to a handle slot.
 */
enum D21Status d21_gamma_rep_new(int32_t s, struct D21GammaRep **out);

/*
 # Safety
 `rep` must be null or a handle from [`d21_gamma_rep_new`] not yet freed.
 */
void d21_gamma_rep_free(struct D21GammaRep *rep);

/*
 Writes γ̂^index (index 0..2) row-major into `out[4]`.

 # Safety
 `rep` must be a live handle and `out` must point to 4 writable values.
 */
enum D21Status d21_gamma_matrix(const struct D21GammaRep *rep,
                                uint32_t index,
                                struct D21Complex *out);

/*
 Largest deviation of the anticommutators from 2η^{ab}I.

 # Safety
 `rep` must be a live handle and `out` a valid pointer.
 */
enum D21Status d21_gamma_rep_clifford_residual(const struct D21GammaRep *rep, double *out);

/*
 Creates a chart by id: cartesian, polar, rindler_t, rindler_x, null_plane,
 null_parabolic (uses `a`), null_projective.

 # Safety
 `id` must be a NUL-terminated string and `out` a valid handle slot.
 */
enum D21Status d21_chart_new(const char *id, double a, struct D21Chart **out);

/*
 # Safety
 `chart` must be null or a handle from [`d21_chart_new`] not yet freed.
 */
void d21_chart_free(struct D21Chart *chart);

/*
 Metric g_{μν} at chart point `u[3]`, row-major into `out[9]`.

 # Safety
 `chart` must be a live handle, `u` readable for 3 values, `out` writable for 9.
 */
enum D21Status d21_chart_metric(const struct D21Chart *chart, const double *u, double *out);

/*
 Christoffel symbols Γ^μ_{να} at `u[3]` into `out[27]`, index 9μ + 3ν + α.

 # Safety
 `chart` must be a live handle, `u` readable for 3 values, `out` writable for 27.
 */
enum D21Status d21_chart_christoffel(const struct D21Chart *chart, const double *u, double *out);

/*
 Cartesian point of chart point `u[3]` into `out[3]`.

 # Safety
 `chart` must be a live handle, `u` readable and `out` writable for 3 values.
 */
enum D21Status d21_chart_to_cartesian(const struct D21Chart *chart, const double *u, double *out);

/*
 Chart point of Cartesian point `x[3]` into `out[3]`.

 # Safety
 `chart` must be a live handle, `x` readable and `out` writable for 3 values.
 */
enum D21Status d21_chart_to_chart(const struct D21Chart *chart, const double *x, double *out);

/*
 Runs the separation pipeline for a configuration given as text in the
 CLI config format (an empty string selects the defaults). No files are
 written.

 # Safety
 `config` must be a NUL-terminated string and `out` a valid handle slot.
 */
enum D21Status d21_solve(const char *config, struct D21Solution **out);

/*
 # Safety
 `sol` must be null or a handle from [`d21_solve`] not yet freed.
 */
void d21_solution_free(struct D21Solution *sol);

/*
 Relative Dirac residual max|Hφ|/max|φ| over the verification grid.

 # Safety
 `sol` must be a live handle and `out` a valid pointer.
 */
enum D21Status d21_solution_residual(const struct D21Solution *sol, double *out);

/*
 Eigen-relation residuals of both operators into `out[2]`.

 # Safety
 `sol` must be a live handle and `out` writable for 2 values.
 */
enum D21Status d21_solution_eigen_residuals(const struct D21Solution *sol, double *out);

/*
 1 when every verification passed, 0 otherwise.

 # Safety
 `sol` must be a live handle and `out` a valid pointer.
 */
enum D21Status d21_solution_pass(const struct D21Solution *sol, int32_t *out);

/*
 Cartesian spinor φ_C at `x[3]` into `out[2]`.

 # Safety
 `sol` must be a live handle, `x` readable for 3 values, `out` writable for 2.
 */
enum D21Status d21_solution_eval(const struct D21Solution *sol,
                                 const double *x,
                                 struct D21Complex *out);

/*
 Reduced solution ψ̃(t) into `out[2]` (dense output).

 # Safety
 `sol` must be a live handle and `out` writable for 2 values.
 */
enum D21Status d21_solution_reduced(const struct D21Solution *sol,
                                    double t,
                                    struct D21Complex *out);

/*
 Trajectory CSV (t, Re ψ̃₁, Im ψ̃₁, Re ψ̃₂, Im ψ̃₂) as a newly allocated
 string; release it with [`d21_string_free`].

 # Safety
 `sol` must be a live handle and `out` a valid pointer.
 */
enum D21Status d21_solution_trajectory_csv(const struct D21Solution *sol, char **out);

/*
 # Safety
 `s` must be null or a string returned by this library not yet freed.
 */
void d21_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIRAC21_H */
