/* C ABI for the canon reproducibility toolkit. Generated by cbindgen; do not edit. */

#ifndef CANON_FFI_H
#define CANON_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible entry point.
typedef enum CanonStatus {
  CANON_OK = 0,
  CANON_INVALID_ARGUMENT = 1,
  CANON_PARSE_ERROR = 2,
  CANON_WRITE_ERROR = 3,
  CANON_INTERNAL_ERROR = 4,
} CanonStatus;

// Built-in canonicalization profile.
typedef enum CanonProfile {
  CANON_PROFILE_ARCHIVE_ONLY = 0,
  CANON_PROFILE_DEFAULT = 1,
  CANON_PROFILE_AGGRESSIVE = 2,
} CanonProfile;

// Verification outcome of a pair.
typedef enum CanonVerdictStatus {
  CANON_REPRODUCIBLE = 0,
  CANON_REPRODUCIBLE_AFTER_CANONICALIZATION = 1,
  CANON_UNREPRODUCIBLE = 2,
} CanonVerdictStatus;

// Opaque verdict handle; free with [`canon_verdict_free`].
typedef struct CanonVerdict CanonVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Verify a reference/rebuild pair under a built-in profile.
//
// `timestamp` pins the canonical mtime (seconds since the epoch, at least
// 315532800); pass 0 for the default 1980-01-01. On success `*out_verdict`
// owns a verdict handle.
//
// # Safety
// `reference`/`rebuild` must point to `reference_len`/`rebuild_len`
// readable bytes, and `out_verdict` must be a valid writable pointer.
enum CanonStatus canon_verify(const uint8_t *reference,
                              size_t reference_len,
                              const uint8_t *rebuild,
                              size_t rebuild_len,
                              enum CanonProfile profile,
                              int64_t timestamp,
                              struct CanonVerdict **out_verdict);

// Status of a verdict handle.
//
// # Safety
// `verdict` must be a live handle from [`canon_verify`].
enum CanonVerdictStatus canon_verdict_status(const struct CanonVerdict *verdict);

// Render the verdict (raw and canonical reports, applied rules, notes) as
// JSON. Free the string with [`canon_string_free`].
//
// # Safety
// `verdict` must be a live handle from [`canon_verify`].
char *canon_verdict_to_json(const struct CanonVerdict *verdict);

// Release a verdict handle.
//
// # Safety
// `verdict` must have come from [`canon_verify`] and not be freed twice.
void canon_verdict_free(struct CanonVerdict *verdict);

// Canonicalize one artifact. On success `*out`/`*out_len` hold a buffer
// owned by the caller; release it with [`canon_bytes_free`].
//
// # Safety
// `input` must point to `input_len` readable bytes; `out` and `out_len`
// must be valid writable pointers.
enum CanonStatus canon_stabilize(const uint8_t *input,
                                 size_t input_len,
                                 enum CanonProfile profile,
                                 int64_t timestamp,
                                 uint8_t **out,
                                 size_t *out_len);

// Release a buffer from [`canon_stabilize`].
//
// # Safety
// `bytes`/`len` must describe exactly one buffer previously returned by
// this library.
void canon_bytes_free(uint8_t *bytes, size_t len);

// The rule catalog as JSON. Free with [`canon_string_free`].
char *canon_rules_json(void);

// Release a string returned by this library.
//
// # Safety
// `text` must have come from this library and not be freed twice.
void canon_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CANON_FFI_H */
