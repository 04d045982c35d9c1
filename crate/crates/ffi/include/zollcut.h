#ifndef ZOLLCUT_H
#define ZOLLCUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZcStatus {
  ZC_STATUS_OK = 0,
  ZC_STATUS_NULL_POINTER = 1,
  ZC_STATUS_INVALID_ARGUMENT = 2,
  ZC_STATUS_DIM_MISMATCH = 3,
  ZC_STATUS_NUMERICAL = 4,
  ZC_STATUS_BUFFER_TOO_SMALL = 5,
  ZC_STATUS_IO = 6,
  ZC_STATUS_PANIC = 7,
} ZcStatus;

/**
 * Codes for the `f` argument of [`zc_szego_check`].
 */
typedef enum ZcFunction {
  ZC_FUNCTION_ID = 0,
  ZC_FUNCTION_SQUARE = 1,
  ZC_FUNCTION_QUARTIC = 2,
  ZC_FUNCTION_COS = 3,
} ZcFunction;

/**
 * Propagator `e^{−itN ΠQ̂Π}` for one `N` and energy cutoff.
 */
typedef struct ZcPropagator ZcPropagator;

/**
 * Coefficients of a Bargmann-space state.
 */
typedef struct ZcState ZcState;

/**
 * Outcome of a trace-versus-integral comparison.
 */
typedef struct ZcSzegoResult {
  double lhs;
  double rhs;
  double abs_error;
  /**
   * `abs_error / ln N`; NaN for `N < 2`.
   */
  double normalized_error;
  /**
   * Whether every built-in reference check passed.
   */
  bool pass;
} ZcSzegoResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL if none.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *zc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *zc_version(void);

/**
 * Coherent state at `w = w_re + i·w_im` for `ℏ = 1/n`, projected onto the
 * basis indices `0..=floor(n·energy)`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum ZcStatus zc_coherent_state_new(uint32_t n,
                                    double w_re,
                                    double w_im,
                                    double energy,
                                    struct ZcState **out);

/**
 * State with the given coefficients for `ℏ = 1/n`.
 *
 * # Safety
 * `re` and `im` must each point to `len` readable doubles; `out` must be
 * writable.
 */
enum ZcStatus zc_state_from_coeffs(uint32_t n,
                                   const double *re,
                                   const double *im,
                                   size_t len,
                                   struct ZcState **out);

/**
 * Releases a state; NULL is ignored.
 *
 * # Safety
 * `state` must be NULL or a handle from this library not yet freed.
 */
void zc_state_free(struct ZcState *state);

/**
 * # Safety
 * `state` must be a live handle and `out_len` writable.
 */
enum ZcStatus zc_state_len(const struct ZcState *state, size_t *out_len);

/**
 * # Safety
 * `state` must be a live handle and `out_norm` writable.
 */
enum ZcStatus zc_state_norm(const struct ZcState *state, double *out_norm);

/**
 * Copies the coefficients into `re[0..len)` and `im[0..len)`; `len` must be
 * at least the state length.
 *
 * # Safety
 * `state` must be a live handle; `re` and `im` must each have room for
 * `len` doubles.
 */
enum ZcStatus zc_state_coeffs(const struct ZcState *state, double *re, double *im, size_t len);

/**
 * Propagator for `Π Q̂ Π` with `ℏ = 1/n` and cutoff `floor(n·energy)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ZcStatus zc_propagator_new_cut_q(uint32_t n, double energy, struct ZcPropagator **out);

/**
 * # Safety
 * `prop` must be a live handle and `out_dim` writable.
 */
enum ZcStatus zc_propagator_dim(const struct ZcPropagator *prop, size_t *out_dim);

/**
 * Evolves `state` to time `t` into a new handle.
 *
 * # Safety
 * `prop` and `state` must be live handles; `out` must be writable.
 */
enum ZcStatus zc_propagator_apply(const struct ZcPropagator *prop,
                                  const struct ZcState *state,
                                  double t,
                                  struct ZcState **out);

/**
 * Releases a propagator; NULL is ignored.
 *
 * # Safety
 * `prop` must be NULL or a handle from this library not yet freed.
 */
void zc_propagator_free(struct ZcPropagator *prop);

/**
 * Husimi density of `state` on an `nx × np` grid with inclusive bounds,
 * written row-major (`out[i*np + j]` at `x_i`, `p_j`).
 *
 * # Safety
 * `state` must be a live handle; `out` must have room for `len` doubles.
 */
enum ZcStatus zc_husimi_fill(const struct ZcState *state,
                             size_t nx,
                             size_t np,
                             double xmin,
                             double xmax,
                             double pmin,
                             double pmax,
                             double *out,
                             size_t len);

/**
 * Trace of `f(ΠQ̂Π)` against `(N/2π)∫_{P≤E} f∘Q`; `f` is a [`ZcFunction`]
 * value.
 *
 * # Safety
 * `out` must be writable.
 */
enum ZcStatus zc_szego_check(uint32_t f, uint32_t n, double energy, struct ZcSzegoResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZOLLCUT_H */
