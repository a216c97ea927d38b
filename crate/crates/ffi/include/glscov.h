#ifndef GLSCOV_H
#define GLSCOV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GlsStatus {
  GLS_STATUS_OK = 0,
  GLS_STATUS_DOMAIN = 1,
  GLS_STATUS_UNSUPPORTED = 2,
  GLS_STATUS_EMPTY_SUPPORT = 3,
  GLS_STATUS_TRIVIAL_NATURAL = 4,
  GLS_STATUS_MOMENT_MONOTONICITY = 5,
  GLS_STATUS_INVALID = 6,
  GLS_STATUS_ENUMERATION_TOO_LARGE = 7,
  GLS_STATUS_PARSE = 8,
  GLS_STATUS_IO = 9,
  GLS_STATUS_NULL_POINTER = 10,
  GLS_STATUS_PANIC = 11,
} GlsStatus;

/**
 * Opaque generating function.
 */
typedef struct GlsPsi GlsPsi;

/**
 * A covariance bound: `value` is `+inf` when `feasible` is 0.
 */
typedef struct GlsBound {
  double value;
  int32_t feasible;
} GlsBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *gls_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gls_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void gls_string_free(char *s);

/**
 * Parses a generating function from JSON, e.g. `{"kind":"power","m":2}`.
 */
enum GlsStatus gls_psi_from_json(const char *json, struct GlsPsi **out);

/**
 * Releases a handle. Null is ignored.
 */
void gls_psi_free(struct GlsPsi *psi);

/**
 * The canonical JSON form of a handle; free with [`gls_string_free`].
 */
enum GlsStatus gls_psi_to_json(const struct GlsPsi *psi, char **out);

/**
 * `psi(p)`; `+inf` outside the support.
 */
enum GlsStatus gls_psi_eval(const struct GlsPsi *psi, double p, double *out);

/**
 * The dual `psi(p/(p-1))` as a new handle.
 */
enum GlsStatus gls_psi_dual(const struct GlsPsi *psi, struct GlsPsi **out);

/**
 * `phi[G psi](delta)`, with the sup restricted to `p >= trunc_low` when
 * `trunc_low` is not NaN. `argmax_p` may be null.
 */
enum GlsStatus gls_fundamental(const struct GlsPsi *psi,
                               double delta,
                               double trunc_low,
                               double *value,
                               double *argmax_p);

/**
 * Upper bound on `P(|xi| > y)` for `||xi|| = norm`, valid for `y >= e norm`.
 */
enum GlsStatus gls_tail_bound(const struct GlsPsi *psi, double norm, double y, double *out);

enum GlsStatus gls_davydov_bound(double alpha,
                                 double p,
                                 double q,
                                 double norm_p,
                                 double norm_q,
                                 struct GlsBound *out);

enum GlsStatus gls_ibragimov_bound(double beta,
                                   double p,
                                   double norm_p,
                                   double norm_q,
                                   struct GlsBound *out);

enum GlsStatus gls_strong_bound(const struct GlsPsi *psi,
                                const struct GlsPsi *nu,
                                double beta,
                                double norm_xi,
                                double norm_eta,
                                struct GlsBound *out);

enum GlsStatus gls_uniform_bound(const struct GlsPsi *psi,
                                 const struct GlsPsi *nu,
                                 double alpha,
                                 double norm_xi,
                                 double norm_eta,
                                 struct GlsBound *out);

enum GlsStatus gls_identical_bound(const struct GlsPsi *psi,
                                   double alpha,
                                   double norm_xi,
                                   double norm_eta,
                                   struct GlsBound *out);

/**
 * Exact `alpha` and `beta` of two partitions of a finite space. `f_blocks`
 * and `g_blocks` give each atom's block id (contiguous from 0).
 */
enum GlsStatus gls_mixing_coefficients(const double *probs,
                                       size_t atoms,
                                       const size_t *f_blocks,
                                       const size_t *g_blocks,
                                       double *alpha,
                                       double *beta);

/**
 * Runs the verification campaign with the default families and exponent
 * grid; writes the JSON report. Free with [`gls_string_free`].
 */
enum GlsStatus gls_verify_campaign_json(size_t instances,
                                        uint64_t seed,
                                        size_t max_atoms,
                                        size_t max_blocks,
                                        char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLSCOV_H */
