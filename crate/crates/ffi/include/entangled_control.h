#ifndef ENTANGLED_CONTROL_H
#define ENTANGLED_CONTROL_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EcStatus {
  EC_STATUS_OK = 0,
  /**
   * The computation ran but its check did not pass.
   */
  EC_STATUS_CHECK_FAILED = 1,
  EC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A search would exceed its budget.
   */
  EC_STATUS_INCONCLUSIVE = 3,
  EC_STATUS_IO = 4,
  EC_STATUS_PARSE = 5,
  EC_STATUS_NULL_POINTER = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  EC_STATUS_INTERNAL = 7,
} EcStatus;

/**
 * A Witsenhausen instance at a fixed scale.
 */
typedef struct EcInstance EcInstance;

/**
 * A KS basis set.
 */
typedef struct EcKsSet EcKsSet;

typedef struct EcChannelInfo {
  size_t inputs;
  size_t edges;
  size_t min_degree;
  size_t max_degree;
  size_t alpha;
} EcChannelInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *ec_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void ec_string_free(char *s);

/**
 * The bundled (6,4) set.
 */
struct EcKsSet *ec_ks_set_bundled(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum EcStatus ec_ks_set_load(const char *path, struct EcKsSet **out);

/**
 * # Safety
 * `set` must be NULL or a handle from this library, freed at most once.
 */
void ec_ks_set_free(struct EcKsSet *set);

/**
 * # Safety
 * `set` must be a live handle; `q` and `d` must be writable.
 */
enum EcStatus ec_ks_set_dims(const struct EcKsSet *set, size_t *q, size_t *d);

/**
 * `EC_STATUS_OK` when the set is orthonormal and has the KS property,
 * `EC_STATUS_CHECK_FAILED` otherwise.
 *
 * # Safety
 * `set` must be a live handle.
 */
enum EcStatus ec_verify_ks(const struct EcKsSet *set);

/**
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum EcStatus ec_channel_info(const struct EcKsSet *set, struct EcChannelInfo *out);

/**
 * Instance at scale `t` with control weight `k` (e.g. `"1"`, `"7/2"`,
 * `"0.5"`) and uniform messages.
 *
 * # Safety
 * `set` must be a live handle, `k` a NUL-terminated string and `out`
 * writable.
 */
enum EcStatus ec_instance_new(const struct EcKsSet *set,
                              int64_t t,
                              const char *k,
                              struct EcInstance **out);

/**
 * # Safety
 * `inst` must be NULL or a handle from this library, freed at most once.
 */
void ec_instance_free(struct EcInstance *inst);

/**
 * Cost of the entangled strategy, as an exact fraction string and a double.
 * Either out-pointer may be NULL.
 *
 * # Safety
 * `inst` must be a live handle.
 */
enum EcStatus ec_quantum_cost(const struct EcInstance *inst, char **exact, double *value);

/**
 * Exhaustive search over `|c1| ≤ window`. `budget == 0` means unbounded and
 * `workers == 0` uses the default pool. Writes the result as JSON and
 * returns `EC_STATUS_INCONCLUSIVE` when the budget is exceeded.
 *
 * # Safety
 * `inst` must be a live handle; `json` must be writable.
 */
enum EcStatus ec_classical_search(const struct EcInstance *inst,
                                  uint32_t window,
                                  uint64_t budget,
                                  size_t workers,
                                  char **json);

/**
 * Separation certificate for cost bound `bound`. `t == 0` and `window < 0`
 * select the defaults. Writes the certificate as JSON; returns
 * `EC_STATUS_OK` when certified, `EC_STATUS_INCONCLUSIVE` when the budget
 * was exceeded and `EC_STATUS_CHECK_FAILED` otherwise.
 *
 * # Safety
 * `set` must be a live handle, `k` and `bound` NUL-terminated strings and
 * `json` writable.
 */
enum EcStatus ec_certify(const struct EcKsSet *set,
                         const char *k,
                         const char *bound,
                         int64_t t,
                         int64_t window,
                         uint64_t budget,
                         size_t workers,
                         char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTANGLED_CONTROL_H */
