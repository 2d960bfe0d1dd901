#ifndef CUSPIDAL_H
#define CUSPIDAL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum CuspStatus {
  CUSP_STATUS_OK = 0,
  CUSP_STATUS_NULL_POINTER = 1,
  CUSP_STATUS_INVALID_INPUT = 2,
  CUSP_STATUS_DOMAIN = 3,
  CUSP_STATUS_POLE = 4,
  CUSP_STATUS_UNSUPPORTED = 5,
  CUSP_STATUS_NO_CONVERGENCE = 6,
  CUSP_STATUS_DEGENERATE = 7,
  CUSP_STATUS_PANIC = 8,
} CuspStatus;

/**
 * Which torus of a fiber.
 */
typedef enum CuspStratum {
  CUSP_STRATUM_NARROW = 0,
  CUSP_STRATUM_WIDE = 1,
} CuspStratum;

/**
 * Generator of a Hamiltonian flow.
 */
typedef enum CuspGenerator {
  CUSP_GENERATOR_H = 0,
  CUSP_GENERATOR_F = 1,
} CuspGenerator;

/**
 * Opaque model handle.
 */
typedef struct CuspModel CuspModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread (empty after a success).
 * The pointer stays valid until the next call on this thread.
 */
const char *cusp_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cusp_string_free(char *s);

/**
 * Creates a model from JSON `{"kind": …, "density": …, "x0": …, "mu_shift": …}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CuspStatus cusp_model_from_json(const char *json, struct CuspModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `m` must come from [`cusp_model_from_json`] and not have been freed.
 */
void cusp_model_free(struct CuspModel *m);

/**
 * The constants `C₀`, `C₁` of the basic periods.
 *
 * # Safety
 * Outputs must be valid pointers.
 */
enum CuspStatus cusp_constants(double *c0, double *c1);

/**
 * `Γ(x)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CuspStatus cusp_gamma(double x, double *out);

/**
 * Passage time Π(H, λ) between the sections.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum CuspStatus cusp_passage_time(const struct CuspModel *m, double h, double lambda, double *out);

/**
 * Action of the torus in the given stratum: `I∘` (narrow) or `I_μ` (wide).
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum CuspStatus cusp_action(const struct CuspModel *m,
                            double h,
                            double lambda,
                            enum CuspStratum stratum,
                            double *out);

/**
 * Brieskorn reduction of a density JSON; writes `{"alpha": […], "beta": […]}`.
 *
 * # Safety
 * `density_json` must be NUL-terminated; `out` a valid pointer. Free the
 * result with [`cusp_string_free`].
 */
enum CuspStatus cusp_decompose(const char *density_json, char **out);

/**
 * Action chart on the model's default `nh × nl` grid, as CSV.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer. Free the result with
 * [`cusp_string_free`].
 */
enum CuspStatus cusp_action_chart_csv(const struct CuspModel *m, size_t nh, size_t nl, char **out);

/**
 * Hamiltonian field of `H` or `F` at `(x, y, λ, φ)`.
 *
 * # Safety
 * `point` must point to 4 doubles and `out` to room for 4.
 */
enum CuspStatus cusp_hamiltonian_field(const struct CuspModel *m,
                                       enum CuspGenerator generator,
                                       const double *point,
                                       double *out);

/**
 * Flow of `H` or `F` for time `t`, in place on `point` (4 doubles).
 *
 * # Safety
 * `point` must point to 4 doubles.
 */
enum CuspStatus cusp_flow(const struct CuspModel *m,
                          enum CuspGenerator generator,
                          double t,
                          double *point);

/**
 * Period lattice basis (row-major 2×2: rows are `(t_H, t_F)` lattice vectors).
 *
 * # Safety
 * `out` must have room for 4 doubles.
 */
enum CuspStatus cusp_period_lattice(const struct CuspModel *m,
                                    double h,
                                    double lambda,
                                    enum CuspStratum stratum,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUSPIDAL_H */
