#ifndef MDLNET_H
#define MDLNET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Search strategy of [`mdlnet_learn`].
 */
typedef enum MdlnetLearnMode {
  MDLNET_LEARN_MODE_EXHAUSTIVE = 0,
  MDLNET_LEARN_MODE_GREEDY = 1,
  MDLNET_LEARN_MODE_SUBSAMPLED = 2,
} MdlnetLearnMode;

/**
 * Result code of every fallible call.
 */
typedef enum MdlnetStatus {
  MDLNET_STATUS_OK = 0,
  /**
   * Malformed or out-of-domain input.
   */
  MDLNET_STATUS_INPUT = 1,
  /**
   * A size limit was exceeded.
   */
  MDLNET_STATUS_CAPACITY = 2,
  /**
   * A required pointer argument was null.
   */
  MDLNET_STATUS_NULL_POINTER = 3,
  /**
   * Internal panic; the library state is unaffected.
   */
  MDLNET_STATUS_PANIC = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  MDLNET_STATUS_INVALID_UTF8 = 5,
} MdlnetStatus;

/**
 * Opaque dataset handle.
 */
typedef struct MdlnetDataset MdlnetDataset;

/**
 * Opaque Bayesian network handle.
 */
typedef struct MdlnetNetwork MdlnetNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or "" if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *mdlnet_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library and not yet
 * freed.
 */
void mdlnet_string_free(char *s);

/**
 * Parses a network in the text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum MdlnetStatus mdlnet_network_parse(const char *text, struct MdlnetNetwork **out);

/**
 * Releases a network handle. Null is ignored.
 *
 * # Safety
 * `net` must be null or a live handle from this library.
 */
void mdlnet_network_free(struct MdlnetNetwork *net);

/**
 * Renders a network in the text format under the given name.
 *
 * # Safety
 * `net` must be a live handle, `name` a NUL-terminated string, `out` valid
 * for writes.
 */
enum MdlnetStatus mdlnet_network_to_string(const struct MdlnetNetwork *net,
                                           const char *name,
                                           char **out);

/**
 * Number of variables of a network.
 *
 * # Safety
 * `net` must be a live handle; `out` valid for writes.
 */
enum MdlnetStatus mdlnet_network_num_vars(const struct MdlnetNetwork *net, size_t *out);

/**
 * Parameter count |G| of a network's structure.
 *
 * # Safety
 * `net` must be a live handle; `out` valid for writes.
 */
enum MdlnetStatus mdlnet_network_param_count(const struct MdlnetNetwork *net, uint64_t *out);

/**
 * Joint probability of a complete assignment of `len` value indices.
 *
 * # Safety
 * `net` must be a live handle, `values` point to `len` readable entries,
 * `out` be valid for writes.
 */
enum MdlnetStatus mdlnet_network_joint_prob(const struct MdlnetNetwork *net,
                                            const size_t *values,
                                            size_t len,
                                            double *out);

/**
 * Draws `rows` rows by ancestral sampling with the given seed.
 *
 * # Safety
 * `net` must be a live handle; `out` valid for writes.
 */
enum MdlnetStatus mdlnet_network_sample(const struct MdlnetNetwork *net,
                                        size_t rows,
                                        uint64_t seed,
                                        struct MdlnetDataset **out);

/**
 * Parses dataset CSV. When `schema` is non-null its variables fix the
 * column names and cardinalities; otherwise cardinalities are inferred.
 *
 * # Safety
 * `text` must be a NUL-terminated string, `schema` null or a live handle,
 * `out` valid for writes.
 */
enum MdlnetStatus mdlnet_dataset_parse_csv(const char *text,
                                           const struct MdlnetNetwork *schema,
                                           struct MdlnetDataset **out);

/**
 * Releases a dataset handle. Null is ignored.
 *
 * # Safety
 * `data` must be null or a live handle from this library.
 */
void mdlnet_dataset_free(struct MdlnetDataset *data);

/**
 * # Safety
 * `data` must be a live handle; `out` valid for writes.
 */
enum MdlnetStatus mdlnet_dataset_num_rows(const struct MdlnetDataset *data, size_t *out);

/**
 * Renders a dataset as CSV.
 *
 * # Safety
 * `data` must be a live handle; `out` valid for writes.
 */
enum MdlnetStatus mdlnet_dataset_to_csv(const struct MdlnetDataset *data, char **out);

/**
 * Scores the structure given as an edge list (`"X->Y Y->Z"`, empty for no
 * edges). Either out-pointer may be null.
 *
 * # Safety
 * `data` must be a live handle, `structure` and `penalty` NUL-terminated
 * strings, each out-pointer null or valid for writes.
 */
enum MdlnetStatus mdlnet_score(const struct MdlnetDataset *data,
                               const char *structure,
                               const char *penalty_token,
                               double *out_score,
                               double *out_log_likelihood);

/**
 * Learns a network. `restarts` applies to greedy search; `eps` and `delta`
 * to the subsampled mode; `seed` to both. `out_score` may be null.
 *
 * # Safety
 * `data` must be a live handle, `penalty` a NUL-terminated string, `out`
 * valid for writes, `out_score` null or valid for writes.
 */
enum MdlnetStatus mdlnet_learn(const struct MdlnetDataset *data,
                               const char *penalty_token,
                               enum MdlnetLearnMode mode,
                               size_t restarts,
                               double eps,
                               double delta,
                               uint64_t seed,
                               struct MdlnetNetwork **out,
                               double *out_score);

/**
 * (N+1)^card_u · 2^(−N·eps). May be +inf.
 */
double mdlnet_sanov_bound(uint64_t n_samples, uint64_t card_u, double eps);

/**
 * (N+1)^card_u · 2^(−N·((1−m)m/4)²). May be +inf.
 */
double mdlnet_skew_bound(uint64_t n_samples, uint64_t card_u, double m);

/**
 * Minimal N with N/ψ(N) > g/eps.
 *
 * # Safety
 * `penalty` must be a NUL-terminated string; `out` valid for writes.
 */
enum MdlnetStatus mdlnet_ideal_case_n(uint64_t g,
                                      double eps,
                                      const char *penalty_token,
                                      uint64_t *out);

/**
 * The x ≥ 4 with x / log₂ x = y, for y ≥ 2.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MdlnetStatus mdlnet_f_inverse(double y, double *out);

/**
 * Error function e(a, b, c, m). Writes 1 to `out_valid` and the value to
 * `out` inside its domain, 0 to `out_valid` otherwise.
 *
 * # Safety
 * Both out-pointers must be valid for writes.
 */
enum MdlnetStatus mdlnet_lemma37_e(double a,
                                   double b,
                                   double c,
                                   double m,
                                   double *out,
                                   int32_t *out_valid);

/**
 * Sub-sample size for estimating the entropy of a `card`-valued variable.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MdlnetStatus mdlnet_family_sample_size(size_t card,
                                            double m,
                                            double eps,
                                            double delta,
                                            uint64_t *out);

/**
 * Minimal N meeting (eps, delta) for the given problem, with the default
 * search grid and cap. `out_feasible` receives 0 when no N below the cap
 * works, in which case the other outputs are untouched.
 *
 * # Safety
 * `penalty` must be a NUL-terminated string; all out-pointers valid for
 * writes.
 */
enum MdlnetStatus mdlnet_sample_complexity(double eps,
                                           double delta,
                                           uint32_t n_vars,
                                           uint64_t card_u,
                                           double m,
                                           uint64_t g,
                                           const char *penalty_token,
                                           int32_t *out_feasible,
                                           uint64_t *out_n,
                                           double *out_a,
                                           double *out_b);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MDLNET_H */
