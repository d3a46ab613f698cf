#ifndef ADIAEL_H
#define ADIAEL_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Sylvester route selector for [`adiael_reduce`].
 */
typedef enum {
  ADIAEL_METHOD_DIRECT = 0,
  ADIAEL_METHOD_QUADRATURE = 1,
} AdiaelMethod;

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  ADIAEL_STATUS_OK = 0,
  ADIAEL_STATUS_NULL_POINTER = 1,
  ADIAEL_STATUS_INVALID_ARGUMENT = 2,
  ADIAEL_STATUS_BAD_CONFIG = 3,
  ADIAEL_STATUS_SINGULAR = 4,
  ADIAEL_STATUS_DIVERGENT_INTEGRAL = 5,
  ADIAEL_STATUS_DEGENERATE_STEADY_STATE = 6,
  ADIAEL_STATUS_NO_SEPARATION = 7,
  ADIAEL_STATUS_NUMERICAL_FAILURE = 8,
  ADIAEL_STATUS_BUFFER_TOO_SMALL = 9,
  ADIAEL_STATUS_INVALID_UTF8 = 10,
} AdiaelStatus;

/**
 * Opaque bipartite model handle.
 */
typedef struct AdiaelModel AdiaelModel;

/**
 * Opaque reduced-model handle.
 */
typedef struct AdiaelReduced AdiaelReduced;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the message of the most recent error on this thread into `buf`
 * (NUL-terminated, truncated to `len`). Returns the full length including
 * the terminator; call with `len = 0` to query the size.
 *
 * # Safety
 * `buf` must hold `len` bytes when non-NULL.
 */
uintptr_t adiael_last_error_message(char *buf, uintptr_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *adiael_version(void);

/**
 * Parse a JSON model configuration (same schema as the CLI) into a handle.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
AdiaelStatus adiael_model_from_json(const char *json, AdiaelModel **out);

/**
 * Release a model handle. Passing NULL is a no-op.
 *
 * # Safety
 * `m` must be a pointer previously returned by [`adiael_model_from_json`]
 * and not freed since.
 */
void adiael_model_free(AdiaelModel *m);

/**
 * Retained- and eliminated-subsystem dimensions of the model.
 *
 * # Safety
 * `m`, `dim_a`, `dim_b` must be valid pointers.
 */
AdiaelStatus adiael_model_dims(const AdiaelModel *m, uintptr_t *dim_a, uintptr_t *dim_b);

/**
 * Diagnostic timescale ratio `g / kappa_ref`.
 *
 * # Safety
 * `m` and `out` must be valid pointers.
 */
AdiaelStatus adiael_model_epsilon(const AdiaelModel *m, double *out);

/**
 * Default expansion order carried by the configuration.
 *
 * # Safety
 * `m` and `out` must be valid pointers.
 */
AdiaelStatus adiael_model_default_order(const AdiaelModel *m, uintptr_t *out);

/**
 * Run the expansion to `max_order` with the selected Sylvester route.
 *
 * # Safety
 * `m` must be a live model handle and `out` a valid pointer.
 */
AdiaelStatus adiael_reduce(const AdiaelModel *m,
                           uint32_t max_order,
                           AdiaelMethod method,
                           AdiaelReduced **out);

/**
 * Release a reduced-model handle. Passing NULL is a no-op.
 *
 * # Safety
 * `r` must be a pointer previously returned by [`adiael_reduce`].
 */
void adiael_reduced_free(AdiaelReduced *r);

/**
 * Number of computed orders (`max_order + 1`).
 *
 * # Safety
 * `r` and `out` must be valid pointers.
 */
AdiaelStatus adiael_reduced_order_count(const AdiaelReduced *r, uintptr_t *out);

/**
 * Doubles required for the order-n generator (`2 * dim_a^4`).
 *
 * # Safety
 * `r` and `out` must be valid pointers.
 */
AdiaelStatus adiael_reduced_generator_len(const AdiaelReduced *r, uintptr_t *out);

/**
 * Copy the order-n generator contribution (row-major, interleaved re/im).
 *
 * # Safety
 * `r` must be live and `buf` must hold at least `len` doubles.
 */
AdiaelStatus adiael_reduced_generator(const AdiaelReduced *r,
                                      uintptr_t order,
                                      double *buf,
                                      uintptr_t len);

/**
 * Doubles required for an order-n correction map
 * (`2 * (dim_a dim_b)^2 * dim_a^2`).
 *
 * # Safety
 * `r` and `out` must be valid pointers.
 */
AdiaelStatus adiael_reduced_correction_len(const AdiaelReduced *r, uintptr_t *out);

/**
 * Copy the order-n correction map (row-major, interleaved re/im).
 *
 * # Safety
 * `r` must be live and `buf` must hold at least `len` doubles.
 */
AdiaelStatus adiael_reduced_correction(const AdiaelReduced *r,
                                       uintptr_t order,
                                       double *buf,
                                       uintptr_t len);

/**
 * Invariance and gauge residuals of one order.
 *
 * # Safety
 * All pointers must be valid.
 */
AdiaelStatus adiael_reduced_residuals(const AdiaelReduced *r,
                                      uintptr_t order,
                                      double *invariance,
                                      double *gauge);

/**
 * Number of warnings attached to the reduction.
 *
 * # Safety
 * `r` and `out` must be valid pointers.
 */
AdiaelStatus adiael_reduced_warning_count(const AdiaelReduced *r, uintptr_t *out);

/**
 * Copy warning `idx` (NUL-terminated, truncated to `len` bytes). Returns
 * the full length including the terminator through `needed`.
 *
 * # Safety
 * `r` must be live; `buf` must hold `len` bytes when non-NULL.
 */
AdiaelStatus adiael_reduced_warning(const AdiaelReduced *r,
                                    uintptr_t idx,
                                    char *buf,
                                    uintptr_t len,
                                    uintptr_t *needed);

/**
 * Closed-form second-order generator of the resonant exchange model,
 * written as a 4x4 superoperator (32 doubles).
 *
 * # Safety
 * `buf` must hold at least `len` doubles.
 */
AdiaelStatus adiael_jc_generator(double kappa,
                                 double kappa_phi,
                                 double delta,
                                 double n_th,
                                 double g,
                                 double *buf,
                                 uintptr_t len);

/**
 * Closed-form lab-frame coefficients: the Hermitian channel matrix `X`
 * (8 doubles, row-major re/im, basis order `+,-`), the frequency pull `y`,
 * and the Bloch fixed-point data `z_bar`, `r_z`.
 *
 * # Safety
 * `x_buf` must hold 8 doubles; the scalar outputs must be valid pointers.
 */
AdiaelStatus adiael_labframe_coefficients(double kappa,
                                          double kappa_phi,
                                          double omega_b,
                                          double omega_eg,
                                          double n_th,
                                          double g,
                                          double *x_buf,
                                          double *y,
                                          double *z_bar,
                                          double *r_z);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADIAEL_H */
