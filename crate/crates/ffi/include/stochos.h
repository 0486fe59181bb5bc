/* C interface to the stochos numerical kernels. Regenerated by the build script; do not edit. */

#ifndef STOCHOS_H
#define STOCHOS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes for every fallible entry point. Zero is success; 1 and 2
 * match the CLI exit codes for failed assertions and bad configuration, and
 * the remaining library error variants get one code each.
 */
typedef enum StochosStatus {
  STOCHOS_STATUS_OK = 0,
  STOCHOS_STATUS_ASSERTION = 1,
  STOCHOS_STATUS_CONFIG = 2,
  STOCHOS_STATUS_IO = 3,
  STOCHOS_STATUS_JSON = 4,
  STOCHOS_STATUS_DIMENSION = 5,
  STOCHOS_STATUS_NUMERIC = 6,
  STOCHOS_STATUS_DOMAIN = 7,
  STOCHOS_STATUS_STABILITY = 8,
  STOCHOS_STATUS_DEGENERATE_STATE = 9,
  STOCHOS_STATUS_CAPACITY = 10,
  /**
   * A required pointer argument was null.
   */
  STOCHOS_STATUS_NULL_POINTER = 11,
  /**
   * A string argument was not valid UTF-8 or named an unknown option.
   */
  STOCHOS_STATUS_INVALID_ARGUMENT = 12,
  /**
   * An internal invariant failed; the library state is still consistent.
   */
  STOCHOS_STATUS_PANIC = 13,
} StochosStatus;

/**
 * su(N) structure constant table behind an opaque handle.
 */
typedef struct StochosAlgebra StochosAlgebra;

/**
 * Two-component telegraph density on a periodic grid behind an opaque handle.
 */
typedef struct StochosTelegraph StochosTelegraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never null, never freed.
 */
const char *stochos_version(void);

/**
 * Copies the message of the most recent failure on this thread into `buf`
 * (always NUL-terminated when `capacity > 0`) and returns the full message
 * length including the terminator. A return value larger than `capacity`
 * means the copy was truncated. `buf` may be null to query the length.
 *
 * # Safety
 * `buf`, when non-null, must point at `capacity` writable bytes.
 */
size_t stochos_last_error(char *buf, size_t capacity);

/**
 * Executes one named run (`nelson`, `telegraph`, `checkerboard`, `rs-photon`,
 * `rs-field`, `network`, `foam`, or `all`) and writes its artifacts under
 * `out_dir/<name>/<config hash>/`. `config_text` uses the same `key = value`
 * line format as the CLI config files and may be null for defaults. Returns
 * `STOCHOS_STATUS_ASSERTION` when the run completes but a check fails.
 *
 * # Safety
 * `subcommand` and `out_dir` must be NUL-terminated strings; `config_text`
 * may be null or NUL-terminated.
 */
enum StochosStatus stochos_run(const char *subcommand,
                               const char *config_text,
                               const char *out_dir);

/**
 * Builds the su(N) structure constant table for `n >= 2`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle that the
 * caller must release with `stochos_algebra_free`.
 */
enum StochosStatus stochos_algebra_new(size_t n, struct StochosAlgebra **out);

/**
 * Releases a handle from `stochos_algebra_new`. Null is ignored.
 *
 * # Safety
 * `algebra` must be null or a handle not already freed.
 */
void stochos_algebra_free(struct StochosAlgebra *algebra);

/**
 * Adjoint dimension N^2 - 1, the valid index range for the structure
 * constants. Returns 0 for a null handle.
 *
 * # Safety
 * `algebra` must be null or a live handle.
 */
size_t stochos_algebra_dim(const struct StochosAlgebra *algebra);

/**
 * Writes f^{abc} to `out`. Indices are zero-based and must be below the
 * adjoint dimension.
 *
 * # Safety
 * `algebra` must be a live handle and `out` a valid pointer.
 */
enum StochosStatus stochos_algebra_structure_constant(const struct StochosAlgebra *algebra,
                                                      size_t a,
                                                      size_t b,
                                                      size_t c,
                                                      double *out);

/**
 * Builds a telegraph state on a periodic grid over `[x_min, x_max)` with
 * `n_points` cells from the two direction densities.
 *
 * # Safety
 * `p_plus` and `p_minus` must point at `n_points` readable doubles and `out`
 * must be a valid pointer; on success it receives a handle that the caller
 * must release with `stochos_telegraph_free`.
 */
enum StochosStatus stochos_telegraph_new(double x_min,
                                         double x_max,
                                         size_t n_points,
                                         double speed,
                                         double rate,
                                         const double *p_plus,
                                         const double *p_minus,
                                         struct StochosTelegraph **out);

/**
 * Releases a handle from `stochos_telegraph_new`. Null is ignored.
 *
 * # Safety
 * `state` must be null or a handle not already freed.
 */
void stochos_telegraph_free(struct StochosTelegraph *state);

/**
 * Number of grid cells in each direction density. Returns 0 for a null
 * handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t stochos_telegraph_len(const struct StochosTelegraph *state);

/**
 * Advances the densities by one explicit step of size `dt > 0` (upwind
 * transport plus direction exchange).
 *
 * # Safety
 * `state` must be a live handle.
 */
enum StochosStatus stochos_telegraph_step(struct StochosTelegraph *state, double dt);

/**
 * Writes the integral of both densities to `out`.
 *
 * # Safety
 * `state` must be a live handle and `out` a valid pointer.
 */
enum StochosStatus stochos_telegraph_total_probability(const struct StochosTelegraph *state,
                                                       double *out);

/**
 * Copies both direction densities into caller buffers of `capacity` doubles
 * each; `capacity` must be at least `stochos_telegraph_len`.
 *
 * # Safety
 * `state` must be a live handle; `p_plus` and `p_minus` must point at
 * `capacity` writable doubles.
 */
enum StochosStatus stochos_telegraph_copy_densities(const struct StochosTelegraph *state,
                                                    double *p_plus,
                                                    double *p_minus,
                                                    size_t capacity);

/**
 * Evaluates the amplitude of the foam description in the JSON file at
 * `path`. `strategy` 0 enumerates every sign assignment, 1 factors over
 * connected clusters; both produce identical results within the enumeration
 * capacity.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out_re` and `out_im` must be
 * valid pointers.
 */
enum StochosStatus stochos_foam_amplitude(const char *path,
                                          int strategy,
                                          double *out_re,
                                          double *out_im);

/**
 * Variance of a freely spreading Gaussian packet at time `t`:
 * sigma0^2 (1 + (hbar t / 2 m sigma0^2)^2).
 */
double stochos_free_packet_variance(double t, double sigma0, double mass, double hbar);

/**
 * Relativistic dispersion omega(k) = sqrt((m c^2)^2 + (c hbar k)^2) / hbar.
 */
double stochos_dispersion_frequency(double mass, double speed, double hbar, double k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STOCHOS_H */
