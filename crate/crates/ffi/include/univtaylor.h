#ifndef UNIVTAYLOR_H
#define UNIVTAYLOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum UtStatus {
  UT_STATUS_OK = 0,
  UT_STATUS_NULL_ARGUMENT = 1,
  UT_STATUS_INVALID_UTF8 = 2,
  UT_STATUS_PARSE = 3,
  UT_STATUS_INVARIANT = 4,
  UT_STATUS_INSEPARABLE = 5,
  UT_STATUS_BUDGET_EXCEEDED = 6,
  UT_STATUS_IO = 7,
  UT_STATUS_FINGERPRINT_MISMATCH = 8,
  UT_STATUS_OUT_OF_RANGE = 9,
  UT_STATUS_OTHER = 10,
  UT_STATUS_PANIC = 11,
} UtStatus;

/**
 * A parsed and validated scenario.
 */
typedef struct UtScenario UtScenario;

/**
 * A built or loaded series.
 */
typedef struct UtSeries UtSeries;

/**
 * One witness row.
 */
typedef struct UtWitness {
  size_t stage;
  size_t body;
  size_t target;
  double eps;
  size_t lambda;
  uint32_t degree;
  double cloud_err;
  double fine_err;
  double block_l;
  bool met;
} UtWitness;

/**
 * Message of the last failing call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ut_last_error(void);

/**
 * Static version string.
 */
const char *ut_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void ut_string_free(char *s);

/**
 * Parses and validates a scenario given as JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum UtStatus ut_scenario_from_json(const char *json, struct UtScenario **out);

/**
 * Reads, parses and validates a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum UtStatus ut_scenario_load(const char *path, struct UtScenario **out);

/**
 * # Safety
 * `s` must be null or a handle from this library, freed at most once.
 */
void ut_scenario_free(struct UtScenario *s);

/**
 * Stage count `T`, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live scenario handle.
 */
size_t ut_scenario_stages(const struct UtScenario *s);

/**
 * Builds all stages of the scenario.
 *
 * # Safety
 * `s` must be a live scenario handle and `out` a valid pointer.
 */
enum UtStatus ut_series_build(const struct UtScenario *s, struct UtSeries **out);

/**
 * Runs `extra` further stages in place. On failure the series is left
 * unchanged.
 *
 * # Safety
 * `s` and `series` must be live handles.
 */
enum UtStatus ut_series_extend(const struct UtScenario *s, struct UtSeries *series, size_t extra);

/**
 * # Safety
 * `s` must be null or a handle from this library, freed at most once.
 */
void ut_series_free(struct UtSeries *s);

/**
 * Number of stored coefficients, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live series handle.
 */
size_t ut_series_coefficient_count(const struct UtSeries *s);

/**
 * Coefficient at enumeration rank `rank`.
 *
 * # Safety
 * `s` must be a live series handle; `re` and `im` valid pointers.
 */
enum UtStatus ut_series_coefficient(const struct UtSeries *s, size_t rank, double *re, double *im);

/**
 * Number of recorded stages, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live series handle.
 */
size_t ut_series_witness_count(const struct UtSeries *s);

/**
 * Witness of stage `index + 1`.
 *
 * # Safety
 * `s` must be a live series handle and `out` a valid pointer.
 */
enum UtStatus ut_series_witness(const struct UtSeries *s, size_t index, struct UtWitness *out);

/**
 * Partial sum through rank `lambda` (clamped to the stored prefix) at the
 * point `z`, given as `2n` reals `re₁, im₁, …`.
 *
 * # Safety
 * `s` must be a live series handle, `z` must point to `len` doubles and
 * `re`, `im` must be valid pointers.
 */
enum UtStatus ut_series_eval(const struct UtSeries *s,
                             size_t lambda,
                             const double *z,
                             size_t len,
                             double *re,
                             double *im);

/**
 * The series artifact text.
 *
 * # Safety
 * `s` must be a live series handle and `out` a valid pointer.
 */
enum UtStatus ut_series_to_text(const struct UtSeries *s, char **out);

/**
 * Parses series artifact text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum UtStatus ut_series_from_text(const char *text, struct UtSeries **out);

/**
 * Verifies the series against the scenario with verification round
 * `round`. Stores the number of failed rows in `failures` and, when
 * `report_csv` is not null, the report CSV (write time 0).
 *
 * # Safety
 * `s` and `series` must be live handles, `failures` a valid pointer and
 * `report_csv` null or a valid pointer.
 */
enum UtStatus ut_verify(const struct UtScenario *s,
                        const struct UtSeries *series,
                        uint64_t round,
                        size_t *failures,
                        char **report_csv);

#endif  /* UNIVTAYLOR_H */
