/* C interface to the predgc generational-GC simulator. */

#ifndef PREDGC_H
#define PREDGC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  PREDGC_STATUS_OK = 0,
  PREDGC_STATUS_NULL_ARGUMENT = 1,
  PREDGC_STATUS_INVALID_UTF8 = 2,
  PREDGC_STATUS_IO = 3,
  PREDGC_STATUS_PARSE = 4,
  PREDGC_STATUS_INVALID_ARGUMENT = 5,
  /**
   * A reclaim-safety or partition breach; see `predgc_last_error`.
   */
  PREDGC_STATUS_SAFETY_VIOLATION = 6,
  PREDGC_STATUS_NOT_FOUND = 7,
  PREDGC_STATUS_INTERNAL = 8,
} PredgcStatus;

/**
 * Opaque histogram handle.
 */
typedef struct PredgcHistogram PredgcHistogram;

/**
 * Opaque experiment-report handle.
 */
typedef struct PredgcReport PredgcReport;

/**
 * Opaque trace handle.
 */
typedef struct PredgcTrace PredgcTrace;

/**
 * Heap capacities and thresholds.
 */
typedef struct {
  uint64_t eden_capacity_bytes;
  uint64_t survivor_capacity_bytes;
  uint64_t tenured_capacity_bytes;
  uint32_t tenuring_age_threshold;
  double major_gc_occupancy_fraction;
} PredgcHeapConfig;

/**
 * Abstract pause-cost weights.
 */
typedef struct {
  double cost_per_swept_object;
  double cost_per_copied_byte;
  double cost_per_promoted_object;
} PredgcCostModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *predgc_last_error(void);

/**
 * Releases a string returned through a `char **` out-parameter.
 *
 * # Safety
 * `s` must have come from this library and not have been freed already.
 */
void predgc_string_free(char *s);

/**
 * Fills `out` with the default heap configuration.
 *
 * # Safety
 * `out` must be null or point to writable memory for one config struct.
 */
PredgcStatus predgc_heap_config_default(PredgcHeapConfig *out);

/**
 * Fills `out` with the default cost model.
 *
 * # Safety
 * `out` must be null or point to writable memory for one config struct.
 */
PredgcStatus predgc_cost_model_default(PredgcCostModel *out);

/**
 * Generates a synthetic workload trace. `allocations` is the total count,
 * rounded up to a multiple of `flows`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one pointer.
 */
PredgcStatus predgc_trace_generate(uint64_t seed,
                                   uintptr_t flows,
                                   uintptr_t allocations,
                                   double eden_mortality,
                                   double mid_lived_fraction,
                                   double long_lived_fraction,
                                   PredgcTrace **out);

/**
 * Reads a trace file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string.
 */
PredgcStatus predgc_trace_read(const char *path, PredgcTrace **out);

/**
 * Writes a trace to a file.
 *
 * # Safety
 * `trace` must be a live handle; `path` a valid NUL-terminated string.
 */
PredgcStatus predgc_trace_write(const PredgcTrace *trace, const char *path);

/**
 * Number of allocation events in the trace; 0 for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
uintptr_t predgc_trace_alloc_count(const PredgcTrace *trace);

/**
 * Releases a trace handle.
 *
 * # Safety
 * `trace` must be null or a live handle; it must not be used afterwards.
 */
void predgc_trace_free(PredgcTrace *trace);

/**
 * Parses histogram text in the `jmap -histo` layout.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string.
 */
PredgcStatus predgc_histogram_parse(const char *text, PredgcHistogram **out);

/**
 * Number of rows; 0 for a null handle.
 *
 * # Safety
 * `histogram` must be null or a live handle.
 */
uintptr_t predgc_histogram_rows(const PredgcHistogram *histogram);

/**
 * Copies one row out; `class_name` receives a string to release with
 * `predgc_string_free`.
 *
 * # Safety
 * All pointers must be valid; `histogram` a live handle.
 */
PredgcStatus predgc_histogram_row(const PredgcHistogram *histogram,
                                  uintptr_t index,
                                  uint64_t *rank,
                                  uint64_t *instances,
                                  uint64_t *bytes,
                                  char **class_name);

/**
 * Renders the per-class delta CSV between two snapshots (`new - old`).
 *
 * # Safety
 * Both histograms must be live handles; `out_csv` valid.
 */
PredgcStatus predgc_histogram_diff_csv(const PredgcHistogram *old,
                                       const PredgcHistogram *new_,
                                       char **out_csv);

/**
 * Releases a histogram handle.
 *
 * # Safety
 * `histogram` must be null or a live handle; not used afterwards.
 */
void predgc_histogram_free(PredgcHistogram *histogram);

/**
 * Replays the trace under the baseline collector and the predictive
 * collector bound to a ground-truth oracle, checking end-state equivalence.
 * Pass null configs for defaults.
 *
 * # Safety
 * `trace` must be a live handle; config pointers null or valid.
 */
PredgcStatus predgc_run_comparison(const PredgcTrace *trace,
                                   const PredgcHeapConfig *heap_config,
                                   const PredgcCostModel *cost_model,
                                   bool concurrent,
                                   PredgcReport **out);

/**
 * Serializes the whole report as JSON; release with `predgc_string_free`.
 *
 * # Safety
 * `report` must be a live handle; `out_json` valid.
 */
PredgcStatus predgc_report_to_json(const PredgcReport *report, char **out_json);

/**
 * Total stop-the-world pause cost of one arm (`baseline`,
 * `predictive_oracle`, `predictive_trained`).
 *
 * # Safety
 * `report` must be a live handle; `arm` a valid string; `out` valid.
 */
PredgcStatus predgc_report_arm_pause_cost(const PredgcReport *report, const char *arm, double *out);

/**
 * Total live objects the GC handled on the pause path in one arm.
 *
 * # Safety
 * Same contract as `predgc_report_arm_pause_cost`.
 */
PredgcStatus predgc_report_arm_live_handled(const PredgcReport *report,
                                            const char *arm,
                                            uint64_t *out);

/**
 * Oracle-over-baseline pause ratio; `NotFound` when the baseline never
 * paused.
 *
 * # Safety
 * `report` must be a live handle; `out` valid.
 */
PredgcStatus predgc_report_pause_ratio(const PredgcReport *report, double *out);

/**
 * Releases a report handle.
 *
 * # Safety
 * `report` must be null or a live handle; not used afterwards.
 */
void predgc_report_free(PredgcReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PREDGC_H */
