#ifndef BELLMONO_H
#define BELLMONO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BmStatus {
  BM_STATUS_OK = 0,
  BM_STATUS_NULL_POINTER = 1,
  BM_STATUS_INVALID_ARGUMENT = 2,
  BM_STATUS_CERTIFICATION_FAILED = 3,
  BM_STATUS_IO = 4,
  BM_STATUS_PANIC = 5,
} BmStatus;

typedef enum BmFunctional {
  BM_FUNCTIONAL_GENERAL = 0,
  BM_FUNCTIONAL_MERMIN = 1,
} BmFunctional;

typedef enum BmSharing {
  BM_SHARING_SETTINGS = 0,
  BM_SHARING_PLANE = 1,
} BmSharing;

// Opaque anticommuting partition.
typedef struct BmPartition BmPartition;

// Opaque pure state.
typedef struct BmState BmState;

// Settings-search effort; see [`bm_budget_default`].
typedef struct BmBudget {
  size_t grid_resolution;
  size_t refinement_passes;
  size_t restarts;
  uint64_t seed;
  size_t max_sweeps;
} BmBudget;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or an empty string.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *bm_last_error(void);

struct BmBudget bm_budget_default(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void bm_string_free(char *s);

// `(|0..0> + e^{i phase}|1..1>)/sqrt 2` on `n` qubits.
//
// # Safety
// `out` must be valid for a pointer write.
enum BmStatus bm_state_ghz(size_t n, double phase, struct BmState **out);

// Star witness on `2m + 1` qubits.
//
// # Safety
// `out` must be valid for a pointer write.
enum BmStatus bm_state_psi_mono(size_t m, double alpha, struct BmState **out);

// Equal superposition over the chosen root-to-leaf paths of a binary tree.
//
// # Safety
// `paths` must point to `n_paths` readable values; `out` must be valid for
// a pointer write.
enum BmStatus bm_state_tree(size_t depth,
                            const size_t *paths,
                            size_t n_paths,
                            struct BmState **out);

// Builds a state from a spec such as `"ghz:n=3"` or `"file:state.json"`.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be valid for a
// pointer write.
enum BmStatus bm_state_parse(const char *spec, struct BmState **out);

// # Safety
// `json` must be a NUL-terminated string; `out` must be valid for a
// pointer write.
enum BmStatus bm_state_from_json(const char *json, struct BmState **out);

// # Safety
// `state` must be valid; `out` must be valid for a pointer write.
enum BmStatus bm_state_to_json(const struct BmState *state, char **out);

// # Safety
// `state` must be null or a handle from this library, not yet freed.
void bm_state_free(struct BmState *state);

// Qubit count, or 0 for a null handle.
//
// # Safety
// `state` must be null or valid.
size_t bm_state_n_qubits(const struct BmState *state);

// `<psi|P|psi>` for a Pauli label such as `"XYZ"`.
//
// # Safety
// `state` must be valid, `label` NUL-terminated and `out` writable.
enum BmStatus bm_expectation(const struct BmState *state, const char *label, double *out);

// Whether two Pauli labels of equal length anticommute.
//
// # Safety
// `a` and `b` must be NUL-terminated; `out` must be writable.
enum BmStatus bm_anticommutes(const char *a, const char *b, bool *out);

// Numerical quantum value of `functional` on the parties in `subset`.
// A null `budget` selects the default.
//
// # Safety
// `subset` must point to `n` readable values, `budget` must be null or
// valid, `state` valid and `out` writable.
enum BmStatus bm_maximize_bell(const struct BmState *state,
                               const size_t *subset,
                               size_t n,
                               enum BmFunctional functional,
                               const struct BmBudget *budget,
                               double *out);

// Upper bound on the general value from the correlations in each party's
// plane. `planes` holds six numbers per party (two orthonormal vectors);
// null means the `xy` plane for everyone.
//
// # Safety
// `subset` must point to `n` readable values, `planes` must be null or
// point to `6 n` readable values, `state` valid and `out` writable.
enum BmStatus bm_eq3_bound(const struct BmState *state,
                           const size_t *subset,
                           size_t n,
                           const double *planes,
                           double *out);

// Built-in partition of a scenario spec (`"triangle"`, `"star:M=2"`, ...),
// certified before it is returned.
//
// # Safety
// `spec` must be NUL-terminated; `out` must be valid for a pointer write.
enum BmStatus bm_partition_for_scenario(const char *spec, struct BmPartition **out);

// Parses the text format: one set per line, labels separated by spaces.
//
// # Safety
// `text` must be NUL-terminated; `out` must be valid for a pointer write.
enum BmStatus bm_partition_from_text(const char *text, struct BmPartition **out);

// # Safety
// `partition` must be null or a handle from this library, not yet freed.
void bm_partition_free(struct BmPartition *partition);

// Number of sets (the monogamy bound), or 0 for a null handle.
//
// # Safety
// `partition` must be null or valid.
size_t bm_partition_set_count(const struct BmPartition *partition);

// # Safety
// `partition` must be valid; `out` must be valid for a pointer write.
enum BmStatus bm_partition_to_text(const struct BmPartition *partition, char **out);

// Checks `state` against the monogamy relation of a scenario spec using
// its built-in partition, and writes the report as JSON.
//
// # Safety
// `scenario` must be NUL-terminated, `state` valid, `budget` null or
// valid, and `out` valid for a pointer write.
enum BmStatus bm_check_state(const char *scenario,
                             const struct BmState *state,
                             enum BmFunctional functional,
                             enum BmSharing sharing,
                             const struct BmBudget *budget,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BELLMONO_H */
