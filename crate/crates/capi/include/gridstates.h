#ifndef GRIDSTATES_H
#define GRIDSTATES_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code for every fallible entry point.
 */
typedef enum GsStatus {
  /**
   * success
   */
  GS_OK = 0,
  /**
   * a required pointer argument was null
   */
  GS_NULL_ARGUMENT = 1,
  /**
   * a string argument was not valid UTF-8
   */
  GS_INVALID_UTF8 = 2,
  /**
   * malformed hypergraph JSON
   */
  GS_PARSE_ERROR = 3,
  /**
   * the hypergraph could not be built into a state
   */
  GS_BUILD_ERROR = 4,
  /**
   * a numeric routine failed; see `gs_last_error`
   */
  GS_COMPUTE_ERROR = 5,
  /**
   * unknown built-in state name
   */
  GS_UNKNOWN_NAME = 6,
} GsStatus;

/**
 * Opaque hypergraph handle.
 */
typedef struct GsHypergraph GsHypergraph;

/**
 * PPT verdict over the C ABI.
 */
typedef struct GsPptVerdict {
  /**
   * 0 = PPT (graphical), 1 = PPT (numeric), 2 = NPT, 3 = inconclusive
   */
  int32_t status;
  double min_eigenvalue_pt;
} GsPptVerdict;

/**
 * Schmidt-number bounds over the C ABI.
 */
typedef struct GsSnBounds {
  uintptr_t lower;
  uintptr_t upper;
  /**
   * 1 when the lower bound carries a replayable proof tree
   */
  int32_t proved;
} GsSnBounds;

/**
 * Extremality verdict over the C ABI.
 */
typedef struct GsExtremality {
  uintptr_t multiplicity_of_2;
  double second_eigenvalue_gap;
  /**
   * 1 when the state is extremal in the PPT set
   */
  int32_t is_extremal;
} GsExtremality;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *gs_last_error(void);

/**
 * Parses a hypergraph from its canonical JSON form.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum GsStatus gs_hypergraph_from_json(const char *json, struct GsHypergraph **out);

/**
 * Looks up a built-in state by name (crosshatch, rho_5_5, rho_2, rho_3,
 * rho_4_12, horodecki).
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum GsStatus gs_hypergraph_builtin(const char *name, struct GsHypergraph **out);

/**
 * Releases a hypergraph handle (null is ignored).
 *
 * # Safety
 * `h` must have been returned by this library and not freed before.
 */
void gs_hypergraph_free(struct GsHypergraph *h);

/**
 * Serializes a hypergraph to its canonical JSON form.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer; free the result with
 * `gs_string_free`.
 */
enum GsStatus gs_hypergraph_to_json(const struct GsHypergraph *h, char **out);

/**
 * Releases a string returned by this library (null is ignored).
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void gs_string_free(char *s);

/**
 * Runs the graphical PPT criterion with numeric fallback.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum GsStatus gs_ppt_check(const struct GsHypergraph *h, struct GsPptVerdict *out);

/**
 * Certifies Schmidt-number bounds with the symbolic prover.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum GsStatus gs_schmidt_bounds(const struct GsHypergraph *h,
                                uintptr_t node_budget,
                                struct GsSnBounds *out);

/**
 * Tests PPT-extremality of the state built from `h`.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum GsStatus gs_extremality(const struct GsHypergraph *h, double tol, struct GsExtremality *out);

/**
 * Lower-bounds the witness separable value by multi-start seesaw.
 *
 * # Safety
 * `h` must be a live handle and `mu_l` a valid pointer.
 */
enum GsStatus gs_mu_lower(const struct GsHypergraph *h,
                          uintptr_t starts,
                          uint64_t seed,
                          double *mu_l);

/**
 * Upper-bounds the witness separable value by the level-n relaxation.
 *
 * # Safety
 * `h` must be a live handle; `mu_u` and `converged` must be valid pointers.
 */
enum GsStatus gs_mu_upper(const struct GsHypergraph *h,
                          uintptr_t level,
                          double eps,
                          double *mu_u,
                          int32_t *converged);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRIDSTATES_H */
