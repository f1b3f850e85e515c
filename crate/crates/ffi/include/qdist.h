#ifndef QDIST_H
#define QDIST_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum QdStatus {
  QD_STATUS_OK = 0,
  /**
   * Invalid parameters, scale or group combination.
   */
  QD_STATUS_BAD_PARAM = 1,
  /**
   * Malformed JSON, element string or UTF-8.
   */
  QD_STATUS_PARSE = 2,
  /**
   * An iterative method stopped early or an embedding vanished.
   */
  QD_STATUS_NUMERICAL = 3,
  /**
   * A size cap or checked arithmetic bound was hit.
   */
  QD_STATUS_CAP_EXCEEDED = 4,
  QD_STATUS_IO = 5,
  /**
   * A required pointer argument was null.
   */
  QD_STATUS_NULL_POINTER = 6,
  /**
   * Internal panic caught at the boundary.
   */
  QD_STATUS_PANIC = 7,
} QdStatus;

/**
 * An equivariant embedding of a finite group.
 */
typedef struct QdBundle QdBundle;

/**
 * A group together with its arithmetic tables.
 */
typedef struct QdGroup QdGroup;

/**
 * A-priori bounds of a bundle. `paper_closed_form` is NaN when the bundle
 * has no profile blocks.
 */
typedef struct QdApriori {
  double lip_bound;
  double colip_bound;
  double dist_bound;
  double paper_closed_form;
  uint32_t valid_up_to;
} QdApriori;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread (empty after a success).
 * The pointer stays valid until the next call on the same thread.
 */
const char *qd_last_error_message(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void qd_string_free(char *s);

/**
 * Builds a group from a JSON spec such as
 * `{"family":"sol-fin","n":5}` or `{"family":"lamplighter-fin","m":2,"n":4}`.
 *
 * # Safety
 * `spec_json` must be a valid C string and `out` a valid pointer.
 */
enum QdStatus qd_group_new(const char *spec_json, struct QdGroup **out_group);

/**
 * # Safety
 * `g` must come from [`qd_group_new`] and not have been freed. Null is ignored.
 */
void qd_group_free(struct QdGroup *g);

/**
 * Order of a finite group; `BadParam` for infinite families.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QdStatus qd_group_order(const struct QdGroup *g, uint64_t *out_order);

/**
 * Exact diameter of the Cayley graph of a finite group.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QdStatus qd_group_diameter(const struct QdGroup *g, uint32_t *out_diameter);

/**
 * Product of two elements given in canonical string form, e.g.
 * `"lamps:0110|pos:2"`. The result is written as a new string.
 *
 * # Safety
 * Pointers must be valid; `x` and `y` must be C strings.
 */
enum QdStatus qd_group_mul(const struct QdGroup *g,
                           const char *x,
                           const char *y,
                           char **out_product);

/**
 * Builds the embedding bundle of a finite group at exponent `p` in [2, 8].
 * `scale = 0` selects the default scale.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QdStatus qd_bundle_new(const struct QdGroup *g,
                            double p,
                            uint32_t scale,
                            struct QdBundle **out_bundle);

/**
 * # Safety
 * `b` must come from [`qd_bundle_new`] and not have been freed. Null is ignored.
 */
void qd_bundle_free(struct QdBundle *b);

/**
 * `||F(g)||_p` for an element in canonical string form.
 *
 * # Safety
 * Pointers must be valid; `element` must be a C string.
 */
enum QdStatus qd_bundle_embed_norm(const struct QdBundle *b, const char *element, double *out_norm);

/**
 * Exact distortion over pairs at distance at most `scale` (0 for the
 * diameter).
 *
 * # Safety
 * Pointers must be valid.
 */
enum QdStatus qd_bundle_distortion(const struct QdBundle *b, uint32_t scale, double *out_dist);

/**
 * # Safety
 * Pointers must be valid.
 */
enum QdStatus qd_bundle_apriori(const struct QdBundle *b, struct QdApriori *out_bound);

/**
 * Bundle manifest as JSON; `with_values` nonzero includes block values.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QdStatus qd_bundle_manifest_json(const struct QdBundle *b,
                                      int32_t with_values,
                                      char **out_json);

/**
 * Least Euclidean distortion of the `n`-point metric `dist` (row-major
 * `n * n`), to relative accuracy `tol`.
 *
 * # Safety
 * `dist` must point to `n * n` doubles.
 */
enum QdStatus qd_exact_c2(const double *dist, uintptr_t n, double tol, double *out_c2);

/**
 * Multiplicative order of `[[a, b], [c, d]]` modulo `n`, searched up to `cap`.
 *
 * # Safety
 * `out_order` must be valid.
 */
enum QdStatus qd_matrix_order(int64_t a,
                              int64_t b,
                              int64_t c,
                              int64_t d,
                              uint64_t n,
                              uint64_t cap,
                              uint64_t *out_order);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDIST_H */
