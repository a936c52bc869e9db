#ifndef SHIFTLATTICE_H
#define SHIFTLATTICE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which classifier `sl_classify` runs.
 */
typedef enum SlClassifier {
  SL_CLASSIFIER_SQUARE = 0,
  SL_CLASSIFIER_CUBE = 1,
  SL_CLASSIFIER_JOINT = 2,
  SL_CLASSIFIER_COORDINATE_SQUARE = 3,
  SL_CLASSIFIER_COORDINATE_CUBE = 4,
} SlClassifier;

typedef enum SlDeltaStatus {
  SL_DELTA_STATUS_BOUNDED_EVIDENCE = 0,
  SL_DELTA_STATUS_CERTIFIED_DIVERGENT = 1,
  SL_DELTA_STATUS_INCONCLUSIVE = 2,
} SlDeltaStatus;

/**
 * Result code of every fallible call.
 */
typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_UTF8 = 2,
  SL_STATUS_PARSE_ERROR = 3,
  SL_STATUS_DIMENSION_MISMATCH = 4,
  SL_STATUS_NOT_INVARIANT = 5,
  SL_STATUS_ZERO_VECTOR = 6,
  SL_STATUS_PARAMETER_OUT_OF_RANGE = 7,
  SL_STATUS_TOP_INDEX_MISMATCH = 8,
  SL_STATUS_INDEPENDENCE_FAILS = 9,
  SL_STATUS_NOT_NILPOTENT = 10,
  SL_STATUS_NON_COORDINATE = 11,
  SL_STATUS_UNRECOGNIZED_PATTERN = 12,
  SL_STATUS_INVALID_WEIGHTS = 13,
  SL_STATUS_ZERO_COEFFICIENT = 14,
  SL_STATUS_SUPPORT_MISMATCH = 15,
  SL_STATUS_UNCLASSIFIABLE = 16,
  SL_STATUS_UNREACHABLE_DIMENSION = 17,
  SL_STATUS_IO = 18,
  SL_STATUS_PANIC = 19,
} SlStatus;

/**
 * Weighted shift: weight family, truncation size and direction.
 */
typedef struct SlSpec SlSpec;

/**
 * Subspace of the truncated space, stored in reduced form.
 */
typedef struct SlSubspace SlSubspace;

typedef struct SlDeltaEstimate {
  double lower_bound;
  enum SlDeltaStatus status;
  size_t witness_m;
  size_t witness_n;
} SlDeltaEstimate;

typedef struct SlCor44 {
  bool hypothesis_met;
  bool unicellular;
} SlCor44;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread ("" after a success).
 * The pointer stays valid until the next call on the same thread.
 */
const char *sl_last_error_message(void);

/**
 * Library version, static string.
 */
const char *sl_version(void);

/**
 * Free a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void sl_string_free(char *s);

/**
 * Build a spec from a family string such as `"harmonic"` or
 * `"geometric:1/3"`.
 *
 * # Safety
 * `family` must be a NUL-terminated string; `out` must be writable.
 */
enum SlStatus sl_spec_new(const char *family, size_t n, bool forward, struct SlSpec **out);

/**
 * # Safety
 * `spec` must come from `sl_spec_new` and not be freed twice.
 */
void sl_spec_free(struct SlSpec *spec);

/**
 * Truncation size of a spec (0 for null).
 *
 * # Safety
 * `spec` must be null or a live handle.
 */
size_t sl_spec_size(const struct SlSpec *spec);

/**
 * Parse `{"ambient_dim": N, "basis": [["p/q", ...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SlStatus sl_subspace_from_json(const char *json, struct SlSubspace **out);

/**
 * Reduced basis as JSON.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_subspace_to_json(const struct SlSubspace *s, char **out);

/**
 * Dimension of the subspace (0 for null).
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t sl_subspace_dim(const struct SlSubspace *s);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void sl_subspace_free(struct SlSubspace *s);

/**
 * Seeded random subspace of dimension `dim` invariant under the
 * `power`-th power of the backward shift.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_random_invariant(const struct SlSpec *spec,
                                  size_t power,
                                  size_t dim,
                                  uint64_t seed,
                                  struct SlSubspace **out);

/**
 * Whether `s` is invariant under the `power`-th power of the spec's shift.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SlStatus sl_is_invariant(const struct SlSubspace *s,
                              const struct SlSpec *spec,
                              size_t power,
                              bool *out);

/**
 * Canonical form as JSON `{tag, params, generators}`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SlStatus sl_classify(const struct SlSubspace *s,
                          const struct SlSpec *spec,
                          enum SlClassifier which,
                          char **out);

/**
 * Cyclic decomposition under the `l`-th power as JSON
 * `{l, generators: [{vector, orbit_len}]}`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SlStatus sl_decompose(const struct SlSubspace *s,
                           const struct SlSpec *spec,
                           size_t l,
                           char **out);

/**
 * Lower estimate of the weight supremum over `2 <= m <= n <= m_max` with
 * `k + 1` terms per cell; `diagonal` restricts to `m = n`.
 *
 * # Safety
 * `family` must be a NUL-terminated string; `out` must be writable.
 */
enum SlStatus sl_delta_estimate(const char *family,
                                size_t k,
                                size_t m_max,
                                double cap,
                                bool diagonal,
                                struct SlDeltaEstimate *out);

/**
 * Unicellularity of `f(T*)` for `f` given as JSON `{"coeffs": ["a0", "a1", ...]}`.
 *
 * # Safety
 * `coeffs_json` must be a NUL-terminated string; `spec` live; `out` writable.
 */
enum SlStatus sl_cor44_check(const char *coeffs_json,
                             const struct SlSpec *spec,
                             struct SlCor44 *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHIFTLATTICE_H */
