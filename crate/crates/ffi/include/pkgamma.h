/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef PKGAMMA_H
#define PKGAMMA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a call.
typedef enum PkStatus {
  PK_STATUS_OK = 0,
  PK_STATUS_NULL_POINTER = 1,
  PK_STATUS_INVALID_PARAMS = 2,
  PK_STATUS_POLE = 3,
  PK_STATUS_DOMAIN = 4,
  PK_STATUS_NO_CONVERGENCE = 5,
  PK_STATUS_DIVERGENT = 6,
  PK_STATUS_MAX_TERMS_EXCEEDED = 7,
  PK_STATUS_LOWER_POLE = 8,
  PK_STATUS_UNSUPPORTED_SHAPE = 9,
  PK_STATUS_INVALID_UTF8 = 10,
  PK_STATUS_PANIC = 11,
} PkStatus;

// A finished audit together with its serialized report.
typedef struct PkAudit PkAudit;

// A validated set of hypergeometric parameters.
typedef struct PkHyper PkHyper;

// A value with an absolute error estimate.
typedef struct PkEval {
  double value;
  double abs_err;
} PkEval;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call into this library on the same thread.
const char *pk_last_error(void);

// Static name of a status code.
const char *pk_status_name(enum PkStatus status);

// `pΓk(x)`.
//
// # Safety
// `out` must be valid for writes.
enum PkStatus pk_gamma(double p, double k, double x, struct PkEval *out);

// `ln|pΓk(x)|` and the sign of `pΓk(x)`; usable where the value overflows.
//
// # Safety
// `ln_abs` and `sign` must be valid for writes.
enum PkStatus pk_ln_gamma(double p, double k, double x, double *ln_abs, double *sign);

// `pBk(x, y)` for positive `x`, `y`.
//
// # Safety
// `out` must be valid for writes.
enum PkStatus pk_beta(double p, double k, double x, double y, struct PkEval *out);

// `pψk(x)`, the logarithmic derivative of `pΓk`.
//
// # Safety
// `out` must be valid for writes.
enum PkStatus pk_psi(double p, double k, double x, struct PkEval *out);

// The `r`-th derivative of `ln pΓk` (`r >= 1`; `r = 1` is [`pk_psi`]).
//
// # Safety
// `out` must be valid for writes.
enum PkStatus pk_polygamma(double p, double k, double x, uint32_t r, struct PkEval *out);

// The Pochhammer symbol `p(x)_{n,k}`.
//
// # Safety
// `out` must be valid for writes.
enum PkStatus pk_poch(double p, double k, double x, uint32_t n, struct PkEval *out);

// Builds hypergeometric parameters from `r` upper triples `(a, p, k)` and
// `q` lower triples `(b, t, s)`, flattened.
//
// # Safety
// `upper` and `lower` must hold `3*r` and `3*q` doubles (either may be
// null when its count is zero); `out` must be valid for writes.
enum PkStatus pk_hyper_new(const double *upper,
                           size_t r,
                           const double *lower,
                           size_t q,
                           struct PkHyper **out);

// Sums the series at `x`.
//
// # Safety
// `hyper` must come from [`pk_hyper_new`] and not be freed; `out` must be
// valid for writes.
enum PkStatus pk_hyper_eval(const struct PkHyper *hyper, double x, struct PkEval *out);

// Releases a handle; null is ignored.
//
// # Safety
// `hyper` must be null or come from [`pk_hyper_new`], and is invalid
// afterwards.
void pk_hyper_free(struct PkHyper *hyper);

// Runs an audit. `suite` is one of `pochhammer gamma beta psi hyper all`;
// `grid` is `default` or `p=..;k=..;x=..;n=..;m=..`; `tol <= 0` selects
// the built-in tolerance table.
//
// # Safety
// `suite` and `grid` must be nul-terminated strings; `out` must be valid
// for writes.
enum PkStatus pk_audit_run(const char *suite, const char *grid, double tol, struct PkAudit **out);

// Whether every evaluated corrected form passed; false for null.
//
// # Safety
// `audit` must be null or a live handle from [`pk_audit_run`].
bool pk_audit_all_pass(const struct PkAudit *audit);

// The JSON report, owned by the handle; null for a null handle.
//
// # Safety
// `audit` must be null or a live handle from [`pk_audit_run`].
const char *pk_audit_report_json(const struct PkAudit *audit);

// Releases an audit handle; null is ignored.
//
// # Safety
// `audit` must be null or come from [`pk_audit_run`], and is invalid
// afterwards.
void pk_audit_free(struct PkAudit *audit);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PKGAMMA_H */
