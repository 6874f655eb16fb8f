#ifndef FFC_H
#define FFC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/* Opaque handles. */

// Result codes.
typedef enum FfcStatus {
  FFC_STATUS_OK = 0,
  // Argument out of range or inconsistent.
  FFC_STATUS_PARAMETER = 1,
  // A resource budget would be exceeded.
  FFC_STATUS_BUDGET = 2,
  // Input outside an operation's contract.
  FFC_STATUS_CONTRACT = 3,
  // Evaluation at a pole.
  FFC_STATUS_POLE = 4,
  // Malformed JSON or number.
  FFC_STATUS_PARSE = 5,
  FFC_STATUS_INTERNAL = 6,
  FFC_STATUS_IO = 7,
  // A required pointer was null or a string was not UTF-8.
  FFC_STATUS_INVALID_ARGUMENT = 8,
  // A Rust panic was caught at the boundary.
  FFC_STATUS_PANIC = 9,
} FfcStatus;

typedef enum FfcKind {
  FFC_KIND_SYM = 0,
  FFC_KIND_ASYM = 1,
} FfcKind;

typedef enum FfcMode {
  FFC_MODE_BIPARTITE = 0,
  FFC_MODE_PLAIN = 1,
} FfcMode;

typedef enum FfcVerdict {
  FFC_VERDICT_STRICTLY_RAMANUJAN = 0,
  FFC_VERDICT_RAMANUJAN_WITH_BOUNDARY = 1,
  FFC_VERDICT_NOT_RAMANUJAN = 2,
} FfcVerdict;

// Exact Ramanujan certificate, including its graph.
typedef struct FfcCertificate FfcCertificate;

// Union of perfect matchings.
typedef struct FfcGraph FfcGraph;

// Polynomial with exact rational coefficients.
typedef struct FfcPoly FfcPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ffc_version(void);

// Message for the last failure on this thread, or null. Valid until the next
// failing call on the same thread.
const char *ffc_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void ffc_string_free(char *s);

// Parses `{"coeffs": ["1", "-3/2", ...]}` (constant term first).
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum FfcStatus ffc_poly_from_json(const char *json, struct FfcPoly **out);

// Builds a polynomial from `len` integer coefficients, constant term first.
//
// # Safety
// `coeffs` must point to `len` values (may be null when `len` is 0).
enum FfcStatus ffc_poly_from_i64(const int64_t *coeffs, uintptr_t len, struct FfcPoly **out);

// # Safety
// `p` must be a live handle and `out` writable. Free the result with
// [`ffc_string_free`].
enum FfcStatus ffc_poly_to_json(const struct FfcPoly *p, char **out);

// Degree, or -1 for the zero polynomial.
//
// # Safety
// `p` must be a live handle.
enum FfcStatus ffc_poly_degree(const struct FfcPoly *p, int64_t *out);

// # Safety
// `p` must be null or a handle not yet freed.
void ffc_poly_free(struct FfcPoly *p);

// `p ⊞_d q` or `p ⊞⊞_d q` depending on `kind`.
//
// # Safety
// Handles must be live and `out` writable.
enum FfcStatus ffc_convolve(enum FfcKind kind,
                            const struct FfcPoly *p,
                            const struct FfcPoly *q,
                            uintptr_t d,
                            struct FfcPoly **out);

// `p` convolved with itself `m` times.
//
// # Safety
// Handles must be live and `out` writable.
enum FfcStatus ffc_m_fold(enum FfcKind kind,
                          const struct FfcPoly *p,
                          uintptr_t m,
                          uintptr_t d,
                          struct FfcPoly **out);

// Exact real-rootedness via Sturm sequences.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum FfcStatus ffc_is_real_rooted(const struct FfcPoly *p, bool *out);

// `2 sqrt(m-1)` as an exact string such as `"2*sqrt(2)"` plus a double.
// Either output pointer may be null.
//
// # Safety
// Non-null outputs must be writable.
enum FfcStatus ffc_ramanujan_bound(uintptr_t m, char **exact, double *approx);

// Samples `m` random perfect matchings on `d` vertices per side
// (bipartite) or `d` vertices in total (plain).
//
// # Safety
// `out` must be writable.
enum FfcStatus ffc_graph_sample(enum FfcMode mode,
                                uintptr_t d,
                                uintptr_t m,
                                uint64_t seed,
                                struct FfcGraph **out);

// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum FfcStatus ffc_graph_from_json(const char *json, struct FfcGraph **out);

// # Safety
// `g` must be a live handle and `out` writable.
enum FfcStatus ffc_graph_to_json(const struct FfcGraph *g, char **out);

// # Safety
// `g` must be null or a handle not yet freed.
void ffc_graph_free(struct FfcGraph *g);

// Exact certification of `g`.
//
// # Safety
// `g` must be a live handle and `out` writable.
enum FfcStatus ffc_certify(const struct FfcGraph *g, struct FfcCertificate **out);

// # Safety
// `c` must be a live handle and `out` writable.
enum FfcStatus ffc_certificate_verdict(const struct FfcCertificate *c, enum FfcVerdict *out);

// Recomputes the certificate from its embedded graph and compares.
//
// # Safety
// `c` must be a live handle and `out` writable.
enum FfcStatus ffc_certificate_reverify(const struct FfcCertificate *c, bool *out);

// # Safety
// `c` must be a live handle and `out` writable.
enum FfcStatus ffc_certificate_to_json(const struct FfcCertificate *c, char **out);

// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum FfcStatus ffc_certificate_from_json(const char *json, struct FfcCertificate **out);

// # Safety
// `c` must be null or a handle not yet freed.
void ffc_certificate_free(struct FfcCertificate *c);

// Rejection search. On success `*out` holds the certificate of the
// lowest-indexed accepted trial and `*trial` its index; if no trial within
// `max_trials` is accepted the call still returns `Ok` with `*out` null.
// `trial` may be null.
//
// # Safety
// `out` must be writable; `trial` null or writable.
enum FfcStatus ffc_search(enum FfcMode mode,
                          uintptr_t d,
                          uintptr_t m,
                          uint64_t max_trials,
                          uint64_t seed,
                          bool allow_boundary,
                          struct FfcCertificate **out,
                          uint64_t *trial);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FFC_H */
