#ifndef TFDIFF_H
#define TFDIFF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Version of this interface; bumped on any incompatible change.
 */
#define TFDIFF_ABI_VERSION 1

typedef enum TfdiffStatus {
  TFDIFF_STATUS_OK = 0,
  TFDIFF_STATUS_NULL_POINTER = 1,
  TFDIFF_STATUS_DOMAIN = 2,
  TFDIFF_STATUS_SHAPE = 3,
  TFDIFF_STATUS_INCONSISTENT_PAIR = 4,
  TFDIFF_STATUS_SINGULAR_DECONVOLUTION = 5,
  TFDIFF_STATUS_INVALID_WEIGHTS = 6,
  TFDIFF_STATUS_CONFIG = 7,
  TFDIFF_STATUS_SUPPORT_VIOLATION = 8,
  TFDIFF_STATUS_STEP_FAILURE = 9,
  TFDIFF_STATUS_BUFFER_TOO_SMALL = 10,
  TFDIFF_STATUS_INTERNAL = 11,
  TFDIFF_STATUS_PANIC = 12,
} TfdiffStatus;

/**
 * States `u^0..u^J` of a one-dimensional solve.
 */
typedef struct TfdiffHistory TfdiffHistory;

/**
 * Discrete kernel weights `b_0..b_{J-1}`.
 */
typedef struct TfdiffKernel TfdiffKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

uint32_t tfdiff_abi_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`) and returns the full message length
 * plus one. Passing a null `buf` only queries the length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t tfdiff_last_error_message(char *buf, size_t len);

/**
 * Cell integrals of `t^{-alpha} / Gamma(1 - alpha)` on `steps` cells of
 * width `tau`.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum TfdiffStatus tfdiff_kernel_rl(double alpha,
                                   double tau,
                                   size_t steps,
                                   struct TfdiffKernel **out);

/**
 * Kernel from caller-supplied weights (nonnegative, nonincreasing).
 *
 * # Safety
 * `weights` must point to `steps` readable values; `out` as above.
 */
enum TfdiffStatus tfdiff_kernel_from_weights(double tau,
                                             const double *weights,
                                             size_t steps,
                                             struct TfdiffKernel **out);

/**
 * Discrete complement `l` with `(k * l)(t_j) = 1` at every node.
 *
 * # Safety
 * `k` must be a live kernel handle; `out` as above.
 */
enum TfdiffStatus tfdiff_kernel_complement(const struct TfdiffKernel *k, struct TfdiffKernel **out);

/**
 * Number of weights; 0 for a null handle.
 *
 * # Safety
 * `k` must be null or a live kernel handle.
 */
size_t tfdiff_kernel_len(const struct TfdiffKernel *k);

/**
 * Copies the weights into `buf`, which must hold `tfdiff_kernel_len(k)` values.
 *
 * # Safety
 * `k` must be a live kernel handle; `buf` must point to `len` writable values.
 */
enum TfdiffStatus tfdiff_kernel_weights(const struct TfdiffKernel *k, double *buf, size_t len);

/**
 * `max_j |(k * l)(t_j) - 1|`.
 *
 * # Safety
 * `k` and `ell` must be live kernel handles; `out` must be writable.
 */
enum TfdiffStatus tfdiff_kernel_sonine_residual(const struct TfdiffKernel *k,
                                                const struct TfdiffKernel *ell,
                                                double *out);

/**
 * # Safety
 * `k` must be null or a handle not freed before.
 */
void tfdiff_kernel_free(struct TfdiffKernel *k);

/**
 * Mittag-Leffler function `E_alpha(z)` for `z <= 0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TfdiffStatus tfdiff_mittag_leffler(double alpha, double z, double *out);

/**
 * Solves `d/dt(g * [v - v0]) = -lambda v^m` and writes `v_1..v_steps`.
 *
 * # Safety
 * `buf` must point to `len >= steps` writable values.
 */
enum TfdiffStatus tfdiff_ode_solve(double alpha,
                                   double lambda,
                                   double m,
                                   double v0,
                                   double tau,
                                   size_t steps,
                                   double *buf,
                                   size_t len);

/**
 * Implicit solve on `(lower, upper)` with mesh `h` and zero boundary
 * values. `u0` holds the interior nodes. For `m != 1` the nonlinearity is
 * regularized with index `regularization` and a cap one above `max |u0|`.
 *
 * # Safety
 * `u0` must point to `u0_len` readable values; `out` must be writable.
 */
enum TfdiffStatus tfdiff_solve_1d(double alpha,
                                  double m,
                                  uint32_t regularization,
                                  double lower,
                                  double upper,
                                  double h,
                                  double tau,
                                  size_t steps,
                                  const double *u0,
                                  size_t u0_len,
                                  struct TfdiffHistory **out);

/**
 * Number of stored states, `steps + 1`; 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live history handle.
 */
size_t tfdiff_history_states(const struct TfdiffHistory *h);

/**
 * Interior nodes per state; 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live history handle.
 */
size_t tfdiff_history_nodes(const struct TfdiffHistory *h);

/**
 * Copies state `u^j` into `buf`.
 *
 * # Safety
 * `h` must be a live history handle; `buf` must point to `len` writable values.
 */
enum TfdiffStatus tfdiff_history_state(const struct TfdiffHistory *h,
                                       size_t j,
                                       double *buf,
                                       size_t len);

/**
 * # Safety
 * `h` must be null or a handle not freed before.
 */
void tfdiff_history_free(struct TfdiffHistory *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFDIFF_H */
