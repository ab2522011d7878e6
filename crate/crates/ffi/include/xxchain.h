#ifndef XXCHAIN_H
#define XXCHAIN_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum XxStatus {
  XX_STATUS_OK = 0,
  XX_STATUS_NULL_POINTER = 1,
  XX_STATUS_INVALID_ARGUMENT = 2,
  XX_STATUS_INVALID_PARAMS = 3,
  XX_STATUS_DEGENERATE_SPECTRUM = 4,
  XX_STATUS_NON_UNIQUE_KERNEL = 5,
  XX_STATUS_NO_KERNEL = 6,
  XX_STATUS_NOT_IN_RANGE = 7,
  XX_STATUS_ILL_CONDITIONED = 8,
  XX_STATUS_INVALID_STATE = 9,
  XX_STATUS_NUMERICAL = 10,
  XX_STATUS_PANIC = 11,
} XxStatus;

typedef enum XxApproach {
  XX_APPROACH_GLOBAL = 0,
  XX_APPROACH_LOCAL = 1,
} XxApproach;

/**
 * A built generator together with its transport observables.
 */
typedef struct XxLiouvillian XxLiouvillian;

/**
 * Model parameters.
 */
typedef struct XxParams XxParams;

/**
 * A normalized density matrix in the computational basis.
 */
typedef struct XxState XxState;

/**
 * Transport observables of one state. Heat currents use the boundary
 * dissipator of the generator the report was computed with.
 */
typedef struct XxTransport {
  double j12;
  double j23;
  double q_left;
  double q_right;
  double sigma_z2_rate;
  double heat_left;
  double heat_right;
} XxTransport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error of the calling thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t xx_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *xx_version(void);

/**
 * Parameters with the same smearing amplitude `h` on both baths.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum XxStatus xx_params_new(double g,
                            double delta,
                            double lambda,
                            double h,
                            double t_left,
                            double t_right,
                            struct XxParams **out);

/**
 * Selects the local boundary frequency: `0` for `2Δ` (default), `1` for `Δ`.
 *
 * # Safety
 * `params` must be a live handle from [`xx_params_new`].
 */
enum XxStatus xx_params_set_local_frequency(struct XxParams *params, int32_t reading);

/**
 * Transition frequencies `ω₀, ω₁, ω₂` into `out[0..3]`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be valid for three doubles.
 */
enum XxStatus xx_params_omegas(const struct XxParams *params, double *out);

/**
 * # Safety
 * `params` must be null or a handle not yet freed.
 */
void xx_params_free(struct XxParams *params);

/**
 * Builds the global or local generator; `lamb_shift` only affects the global one.
 *
 * # Safety
 * `params` must be a live handle; `out` must be valid for a pointer write.
 */
enum XxStatus xx_liouvillian_new(const struct XxParams *params,
                                 enum XxApproach approach,
                                 bool lamb_shift,
                                 struct XxLiouvillian **out);

/**
 * # Safety
 * `l` must be null or a handle not yet freed.
 */
void xx_liouvillian_free(struct XxLiouvillian *l);

/**
 * Copies the 64×64 superoperator (column-stacking convention) in row-major
 * order into `re` and `im`, each of length `len >= 4096`.
 *
 * # Safety
 * `l` must be a live handle; `re` and `im` must be valid for `len` doubles.
 */
enum XxStatus xx_liouvillian_matrix(const struct XxLiouvillian *l,
                                    double *re,
                                    double *im,
                                    size_t len);

/**
 * Unique steady state from the null space of the generator.
 *
 * # Safety
 * `l` must be a live handle; `out` must be valid for a pointer write.
 */
enum XxStatus xx_steady_numeric(const struct XxLiouvillian *l, struct XxState **out);

/**
 * Closed-form global steady state.
 *
 * # Safety
 * `params` must be a live handle; `out` must be valid for a pointer write.
 */
enum XxStatus xx_steady_global_analytic(const struct XxParams *params, struct XxState **out);

/**
 * Computational basis projector such as `"011"`; site 1 is the leftmost bit.
 *
 * # Safety
 * `bits` must be a NUL-terminated string; `out` must be valid for a pointer write.
 */
enum XxStatus xx_state_basis(const char *bits, struct XxState **out);

/**
 * Density matrix from row-major real and imaginary parts of length 64.
 *
 * # Safety
 * `re` and `im` must be valid for 64 doubles; `out` must be valid for a pointer write.
 */
enum XxStatus xx_state_from_entries(const double *re, const double *im, struct XxState **out);

/**
 * Row-major entries of the 8×8 density matrix into `re` and `im` (`len >= 64`).
 *
 * # Safety
 * `state` must be a live handle; `re` and `im` must be valid for `len` doubles.
 */
enum XxStatus xx_state_entries(const struct XxState *state, double *re, double *im, size_t len);

/**
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void xx_state_free(struct XxState *state);

/**
 * Transport observables of `state` under `l`.
 *
 * # Safety
 * Both handles must be live; `out` must be valid for one [`XxTransport`].
 */
enum XxStatus xx_transport(const struct XxLiouvillian *l,
                           const struct XxState *state,
                           struct XxTransport *out);

/**
 * Evolves `initial` under `l` and writes one report per time into `out`.
 * Times must be finite, non-negative and strictly increasing.
 *
 * # Safety
 * Both handles must be live; `times` and `out` must be valid for `n` elements.
 */
enum XxStatus xx_evolve(const struct XxLiouvillian *l,
                        const struct XxState *initial,
                        const double *times,
                        size_t n,
                        struct XxTransport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XXCHAIN_H */
