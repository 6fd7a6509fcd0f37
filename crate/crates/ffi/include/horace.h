#ifndef HORACE_H
#define HORACE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HoraceStatus {
  HORACE_STATUS_OK = 0,
  HORACE_STATUS_NULL_POINTER = 1,
  HORACE_STATUS_INVALID_UTF8 = 2,
  HORACE_STATUS_PARSE = 3,
  HORACE_STATUS_COMPUTE = 4,
  HORACE_STATUS_INVALID_CERTIFICATE = 5,
  HORACE_STATUS_PANIC = 6,
} HoraceStatus;

/**
 * A class `(d; m_1, ..., m_r)` on the blown-up plane.
 */
typedef struct HoraceClass HoraceClass;

/**
 * A zero-dimensional scheme of point conditions.
 */
typedef struct HoraceScheme HoraceScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *horace_last_error(void);

/**
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void horace_string_free(char *s);

/**
 * Parses `"d;m1,m2,..."`.
 *
 * # Safety
 * `text` is a NUL-terminated string; `out` is writable.
 */
enum HoraceStatus horace_class_parse(const char *text, struct HoraceClass **out);

/**
 * # Safety
 * `c` is null or a live handle from [`horace_class_parse`].
 */
void horace_class_free(struct HoraceClass *c);

/**
 * # Safety
 * `c` is a live class handle; `out` is writable.
 */
enum HoraceStatus horace_class_chi(const struct HoraceClass *c, int64_t *out);

/**
 * # Safety
 * `c` is a live class handle; `out` is writable.
 */
enum HoraceStatus horace_class_genus(const struct HoraceClass *c, int64_t *out);

/**
 * # Safety
 * `c` is a live class handle; `out` is writable.
 */
enum HoraceStatus horace_class_expected_dim(const struct HoraceClass *c, int64_t *out);

/**
 * Canonical notation of the class.
 *
 * # Safety
 * `c` is a live class handle; `out` is writable.
 */
enum HoraceStatus horace_class_to_string(const struct HoraceClass *c, char **out);

/**
 * Parses scheme notation. `curve_degree == 0` means no reference curve.
 *
 * # Safety
 * `text` is a NUL-terminated string; `out` is writable.
 */
enum HoraceStatus horace_scheme_parse(const char *text,
                                      uint32_t curve_degree,
                                      struct HoraceScheme **out);

/**
 * # Safety
 * `z` is null or a live handle from [`horace_scheme_parse`].
 */
void horace_scheme_free(struct HoraceScheme *z);

/**
 * Number of linear conditions the scheme imposes.
 *
 * # Safety
 * `z` is a live scheme handle; `out` is writable.
 */
enum HoraceStatus horace_scheme_degree(const struct HoraceScheme *z, uint64_t *out);

/**
 * Rank report (JSON) for degree-`d` forms through `z`. `curve_degree == 0`
 * uses the scheme's own curve.
 *
 * # Safety
 * `z` is a live scheme handle; `report_json` is writable.
 */
enum HoraceStatus horace_oracle_h0(const struct HoraceScheme *z,
                                   int64_t d,
                                   uint32_t curve_degree,
                                   uint64_t prime,
                                   uint32_t trials,
                                   uint64_t seed,
                                   char **report_json);

/**
 * Plans a certificate for `class`. `config_json` may be null (no
 * thresholds); axiom mode then fails with a missing-threshold error.
 *
 * # Safety
 * String arguments are NUL-terminated or null where allowed; `cert_json`
 * is writable.
 */
enum HoraceStatus horace_plan(const char *class_,
                              uint32_t m,
                              bool oracle_backed,
                              const char *config_json,
                              uint64_t seed,
                              char **cert_json);

/**
 * Verifies a certificate. Returns `Ok` with `*valid` set, or
 * `InvalidCertificate` for malformed input.
 *
 * # Safety
 * `cert_json` is NUL-terminated; `valid` is writable.
 */
enum HoraceStatus horace_verify(const char *cert_json, bool *valid);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HORACE_H */
