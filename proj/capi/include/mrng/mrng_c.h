/* C interface to the mrng library.
 *
 * All objects are opaque handles created and released through these
 * functions. Every fallible call returns an mrng_status; on failure the
 * thread-local message from mrng_last_error() describes the cause and no
 * output parameter is written. Handles are immutable after creation and may
 * be shared across threads.
 */
#ifndef MRNG_C_H
#define MRNG_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MRNG_API __declspec(dllexport)
#else
#define MRNG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrng_status {
  MRNG_OK = 0,
  MRNG_INVALID_ARGUMENT = 1,
  MRNG_DIMENSION_MISMATCH = 2,
  MRNG_DUPLICATE_POINTS = 3,
  MRNG_IO_ERROR = 4,
  MRNG_FORMAT_ERROR = 5,
  MRNG_CHECKSUM_MISMATCH = 6,
  MRNG_NOT_LOCAL_MINIMUM = 7,
  MRNG_CAP_EXCEEDED = 8,
  MRNG_INTERNAL_ERROR = 9
} mrng_status;

typedef struct mrng_dataset mrng_dataset;
typedef struct mrng_graph mrng_graph;
typedef struct mrng_conflicts mrng_conflicts;
typedef struct mrng_search_result mrng_search_result;

MRNG_API const char* mrng_version(void);
MRNG_API const char* mrng_status_name(mrng_status status);

/* Message for the most recent failure on the calling thread. */
MRNG_API const char* mrng_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
MRNG_API void mrng_string_free(char* s);

/* ---- datasets ---- */

MRNG_API mrng_status mrng_dataset_generate(uint32_t n, uint32_t d, uint64_t seed,
                                           mrng_dataset** out);
MRNG_API mrng_status mrng_dataset_from_values(uint32_t n, uint32_t d, const double* row_major,
                                              mrng_dataset** out);
MRNG_API mrng_status mrng_dataset_load(const char* path, mrng_dataset** out);
MRNG_API mrng_status mrng_dataset_save(const mrng_dataset* dataset, const char* path);
MRNG_API uint32_t mrng_dataset_count(const mrng_dataset* dataset);
MRNG_API uint32_t mrng_dataset_dim(const mrng_dataset* dataset);
MRNG_API uint64_t mrng_dataset_checksum(const mrng_dataset* dataset);
/* Pointer to the id-th point (dim doubles), valid while the handle lives. */
MRNG_API const double* mrng_dataset_point(const mrng_dataset* dataset, uint32_t id);
MRNG_API void mrng_dataset_free(mrng_dataset* dataset);

/* ---- construction ---- */

#define MRNG_UNBOUNDED_DEGREE 0xFFFFFFFFu

typedef struct mrng_build_options {
  uint32_t degree_bound;   /* MRNG_UNBOUNDED_DEGREE for no bound */
  uint32_t knn_pool_size;  /* 0 = full candidate pool, otherwise kNN pool of this size */
  int record_conflicts;    /* also compute the conflict map */
  uint64_t seed;           /* provenance label stored in the graph meta */
  uint32_t threads;        /* 0 = hardware concurrency */
} mrng_build_options;

/* Builds the graph (exact when unbounded + full pool). out_conflicts may be
 * NULL unless record_conflicts is set; out_report_json (optional) receives a
 * JSON build report with degree stats and distance-evaluation counts. */
MRNG_API mrng_status mrng_build(const mrng_dataset* dataset, const mrng_build_options* options,
                                mrng_graph** out_graph, mrng_conflicts** out_conflicts,
                                char** out_report_json);

MRNG_API mrng_status mrng_compute_conflicts(const mrng_dataset* dataset, const mrng_graph* graph,
                                            uint32_t threads, mrng_conflicts** out);

/* ---- graphs ---- */

MRNG_API uint32_t mrng_graph_node_count(const mrng_graph* graph);
MRNG_API uint32_t mrng_graph_degree(const mrng_graph* graph, uint32_t node);
MRNG_API mrng_status mrng_graph_neighbor(const mrng_graph* graph, uint32_t node, uint32_t index,
                                         uint32_t* out_id, double* out_distance);
MRNG_API uint64_t mrng_graph_dataset_checksum(const mrng_graph* graph);
MRNG_API mrng_status mrng_graph_degree_stats(const mrng_graph* graph, uint32_t* out_min,
                                             uint32_t* out_max, double* out_mean);
MRNG_API mrng_status mrng_graph_save(const mrng_graph* graph, const char* path);
MRNG_API mrng_status mrng_graph_load(const char* path, mrng_graph** out);
MRNG_API void mrng_graph_free(mrng_graph* graph);

MRNG_API mrng_status mrng_conflicts_save(const mrng_conflicts* conflicts, const mrng_graph* graph,
                                         const char* path);
MRNG_API mrng_status mrng_conflicts_load(const char* path, const mrng_graph* graph,
                                         mrng_conflicts** out);
MRNG_API mrng_status mrng_conflicts_list_length(const mrng_conflicts* conflicts, uint32_t node,
                                                uint32_t edge_index, uint32_t* out_length);
MRNG_API mrng_status mrng_conflicts_entry(const mrng_conflicts* conflicts, uint32_t node,
                                          uint32_t edge_index, uint32_t position,
                                          uint32_t* out_id, double* out_distance);
MRNG_API void mrng_conflicts_free(mrng_conflicts* conflicts);

/* ---- search ---- */

MRNG_API mrng_status mrng_closer_and_go(const mrng_graph* graph, const mrng_dataset* dataset,
                                        uint32_t start, const double* query,
                                        mrng_search_result** out);
MRNG_API mrng_status mrng_best_first(const mrng_graph* graph, const mrng_dataset* dataset,
                                     uint32_t entry, const double* query, uint64_t budget,
                                     uint32_t k, mrng_search_result** out);
MRNG_API mrng_status mrng_search_with_escape(const mrng_graph* graph, const mrng_dataset* dataset,
                                             const mrng_conflicts* conflicts, uint32_t entry,
                                             const double* query, uint64_t budget, uint32_t k,
                                             mrng_search_result** out);
MRNG_API mrng_status mrng_conflict_search(const mrng_dataset* dataset, const mrng_graph* graph,
                                          const mrng_conflicts* conflicts, uint32_t node,
                                          const double* query, uint32_t* out_id);
MRNG_API mrng_status mrng_pick_entry(const mrng_dataset* dataset, uint32_t* out_id);

/* Exact k nearest neighbors by linear scan; out_ids/out_distances hold k slots. */
MRNG_API mrng_status mrng_brute_force_knn(const mrng_dataset* dataset, const double* query,
                                          uint32_t k, uint32_t* out_ids, double* out_distances);

MRNG_API uint32_t mrng_result_candidate_count(const mrng_search_result* result);
MRNG_API mrng_status mrng_result_candidate(const mrng_search_result* result, uint32_t index,
                                           uint32_t* out_id, double* out_distance);
MRNG_API uint64_t mrng_result_distance_evals(const mrng_search_result* result);
MRNG_API uint32_t mrng_result_path_length(const mrng_search_result* result);
MRNG_API mrng_status mrng_result_path_node(const mrng_search_result* result, uint32_t index,
                                           uint32_t* out_id);
MRNG_API int mrng_result_terminated_at_local_min(const mrng_search_result* result);
/* JSON lines, one per trace event: {step, node, distance, action}. */
MRNG_API mrng_status mrng_result_trace_json(const mrng_search_result* result, char** out_json);
MRNG_API void mrng_result_free(mrng_search_result* result);

/* ---- verification ---- */

#define MRNG_ALL_EDGES (~(uint64_t)0)

/* Each check writes 1/0 to out_passed and, if out_report_json is non-NULL, a
 * JSON report with counterexample details. */
MRNG_API mrng_status mrng_check_monotonic(const mrng_graph* graph, const mrng_dataset* dataset,
                                          int* out_passed, char** out_report_json);
MRNG_API mrng_status mrng_check_mrng_definition(const mrng_graph* graph,
                                                const mrng_dataset* dataset, int* out_passed,
                                                char** out_report_json);
MRNG_API mrng_status mrng_check_edge_minimality(const mrng_graph* graph,
                                                const mrng_dataset* dataset, uint64_t sample,
                                                int* out_passed, char** out_report_json);
MRNG_API mrng_status mrng_check_angle_separation(const mrng_graph* graph,
                                                 const mrng_dataset* dataset, int* out_passed,
                                                 char** out_report_json);

/* ---- experiments ---- */

typedef struct mrng_experiment_config {
  const char* kind;  /* "degree" | "truncation" | "conflicts" */
  const uint32_t* ns;
  size_t ns_len;
  const uint32_t* ds;
  size_t ds_len;
  const uint32_t* degree_bounds;  /* MRNG_UNBOUNDED_DEGREE allowed; may be NULL */
  size_t degree_bounds_len;
  const uint32_t* budgets;  /* required for "truncation" */
  size_t budgets_len;
  uint32_t n_queries;  /* 0 = default 200 */
  uint32_t k;          /* 0 = default 1 */
  uint64_t seed;
  const char* output_path;  /* NULL = no file written */
  const char* format;       /* "csv" (default) | "json" */
  uint32_t threads;
  int force;  /* override the desk-scale caps */
} mrng_experiment_config;

/* Runs the experiment, writes output_path if given, and returns a JSON
 * summary of all result records through out_summary_json (optional). */
MRNG_API mrng_status mrng_experiment_run(const mrng_experiment_config* config,
                                         char** out_summary_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MRNG_C_H */
