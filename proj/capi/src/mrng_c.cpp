#include "mrng/mrng_c.h"

#include <cstring>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "mrng/build.hpp"
#include "mrng/dataset.hpp"
#include "mrng/error.hpp"
#include "mrng/experiments.hpp"
#include "mrng/graph.hpp"
#include "mrng/search.hpp"
#include "mrng/verify.hpp"
#include "mrng/version.hpp"

struct mrng_dataset {
  mrng::Dataset value;
};
struct mrng_graph {
  mrng::ProximityGraph value;
};
struct mrng_conflicts {
  mrng::ConflictMap value;
};
struct mrng_search_result {
  mrng::SearchResult value;
};

namespace {

thread_local std::string g_last_error;

mrng_status status_from_code(mrng::ErrorCode code) {
  switch (code) {
    case mrng::ErrorCode::invalid_argument: return MRNG_INVALID_ARGUMENT;
    case mrng::ErrorCode::dimension_mismatch: return MRNG_DIMENSION_MISMATCH;
    case mrng::ErrorCode::duplicate_points: return MRNG_DUPLICATE_POINTS;
    case mrng::ErrorCode::io_error: return MRNG_IO_ERROR;
    case mrng::ErrorCode::format_error: return MRNG_FORMAT_ERROR;
    case mrng::ErrorCode::checksum_mismatch: return MRNG_CHECKSUM_MISMATCH;
    case mrng::ErrorCode::not_local_minimum: return MRNG_NOT_LOCAL_MINIMUM;
    case mrng::ErrorCode::cap_exceeded: return MRNG_CAP_EXCEEDED;
  }
  return MRNG_INTERNAL_ERROR;
}

mrng_status fail(mrng_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
mrng_status guarded(Fn&& fn) {
  try {
    fn();
    return MRNG_OK;
  } catch (const mrng::Error& e) {
    g_last_error = e.what();
    return status_from_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MRNG_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MRNG_INTERNAL_ERROR;
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string build_report_json(const mrng::Dataset& dataset, const mrng::ProximityGraph& graph,
                              const mrng::BuildStats& stats) {
  mrng::DegreeStats degrees = mrng::degree_stats(graph);
  nlohmann::json j;
  j["version"] = mrng::kVersion;
  j["n"] = dataset.size();
  j["d"] = dataset.dim();
  j["dataset_checksum"] = dataset.checksum();
  j["degree_bound"] = graph.meta().degree_bound == mrng::kUnboundedDegree
                          ? nlohmann::json("unbounded")
                          : nlohmann::json(graph.meta().degree_bound);
  j["pool"] = graph.meta().pool == mrng::PoolKind::full
                  ? nlohmann::json("full")
                  : nlohmann::json("knn:" + std::to_string(graph.meta().pool_size));
  j["seed"] = graph.meta().seed;
  j["edges"] = graph.edge_count();
  j["degrees"] = {{"min", degrees.min}, {"max", degrees.max}, {"mean", degrees.mean}};
  j["distance_evals"] = stats.distance_evals;
  j["pool_distance_evals"] = stats.pool_distance_evals;
  j["wall_ms"] = stats.wall_ms;
  return j.dump();
}

mrng::PointView query_view(const mrng_dataset* dataset, const double* query) {
  return mrng::PointView(query, dataset->value.dim());
}

mrng_status run_check(int* out_passed, char** out_report_json, const mrng::CheckReport& report) {
  if (out_passed) *out_passed = report.passed ? 1 : 0;
  if (out_report_json) *out_report_json = copy_string(mrng::check_report_to_json(report));
  return MRNG_OK;
}

}  // namespace

extern "C" {

const char* mrng_version(void) { return mrng::kVersion; }

const char* mrng_status_name(mrng_status status) {
  switch (status) {
    case MRNG_OK: return "ok";
    case MRNG_INVALID_ARGUMENT: return "invalid_argument";
    case MRNG_DIMENSION_MISMATCH: return "dimension_mismatch";
    case MRNG_DUPLICATE_POINTS: return "duplicate_points";
    case MRNG_IO_ERROR: return "io_error";
    case MRNG_FORMAT_ERROR: return "format_error";
    case MRNG_CHECKSUM_MISMATCH: return "checksum_mismatch";
    case MRNG_NOT_LOCAL_MINIMUM: return "not_local_minimum";
    case MRNG_CAP_EXCEEDED: return "cap_exceeded";
    case MRNG_INTERNAL_ERROR: return "internal_error";
  }
  return "unknown";
}

const char* mrng_last_error(void) { return g_last_error.c_str(); }

void mrng_string_free(char* s) { delete[] s; }

mrng_status mrng_dataset_generate(uint32_t n, uint32_t d, uint64_t seed, mrng_dataset** out) {
  if (!out) return fail(MRNG_INVALID_ARGUMENT, "out is null");
  return guarded([&] { *out = new mrng_dataset{mrng::generate_uniform_dataset(n, d, seed)}; });
}

mrng_status mrng_dataset_from_values(uint32_t n, uint32_t d, const double* row_major,
                                     mrng_dataset** out) {
  if (!out || !row_major) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<double> coords(row_major, row_major + static_cast<size_t>(n) * d);
    *out = new mrng_dataset{mrng::Dataset(d, std::move(coords))};
  });
}

mrng_status mrng_dataset_load(const char* path, mrng_dataset** out) {
  if (!out || !path) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new mrng_dataset{mrng::load_dataset(path)}; });
}

mrng_status mrng_dataset_save(const mrng_dataset* dataset, const char* path) {
  if (!dataset || !path) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] { mrng::save_dataset(dataset->value, path); });
}

uint32_t mrng_dataset_count(const mrng_dataset* dataset) { return dataset->value.size(); }
uint32_t mrng_dataset_dim(const mrng_dataset* dataset) { return dataset->value.dim(); }
uint64_t mrng_dataset_checksum(const mrng_dataset* dataset) { return dataset->value.checksum(); }

const double* mrng_dataset_point(const mrng_dataset* dataset, uint32_t id) {
  if (!dataset || id >= dataset->value.size()) return nullptr;
  return dataset->value.point(id).data();
}

void mrng_dataset_free(mrng_dataset* dataset) { delete dataset; }

mrng_status mrng_build(const mrng_dataset* dataset, const mrng_build_options* options,
                       mrng_graph** out_graph, mrng_conflicts** out_conflicts,
                       char** out_report_json) {
  if (!dataset || !options || !out_graph) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  if (options->record_conflicts && !out_conflicts) {
    return fail(MRNG_INVALID_ARGUMENT, "record_conflicts set but out_conflicts is null");
  }
  return guarded([&] {
    mrng::BuildParams params;
    params.degree_bound = options->degree_bound;
    params.pool = options->knn_pool_size > 0 ? mrng::PoolKind::knn : mrng::PoolKind::full;
    params.pool_size = options->knn_pool_size;
    params.record_conflicts = options->record_conflicts != 0;
    params.seed = options->seed;
    params.threads = options->threads;

    mrng::BuildOutput output = mrng::build(dataset->value, params);
    if (out_report_json) {
      *out_report_json = copy_string(build_report_json(dataset->value, output.graph, output.stats));
    }
    if (out_conflicts && output.conflicts) {
      *out_conflicts = new mrng_conflicts{std::move(*output.conflicts)};
    } else if (out_conflicts) {
      *out_conflicts = nullptr;
    }
    *out_graph = new mrng_graph{std::move(output.graph)};
  });
}

mrng_status mrng_compute_conflicts(const mrng_dataset* dataset, const mrng_graph* graph,
                                   uint32_t threads, mrng_conflicts** out) {
  if (!dataset || !graph || !out) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new mrng_conflicts{mrng::compute_conflicts(dataset->value, graph->value, threads)};
  });
}

uint32_t mrng_graph_node_count(const mrng_graph* graph) { return graph->value.size(); }

uint32_t mrng_graph_degree(const mrng_graph* graph, uint32_t node) {
  if (!graph || node >= graph->value.size()) return 0;
  return graph->value.degree(node);
}

mrng_status mrng_graph_neighbor(const mrng_graph* graph, uint32_t node, uint32_t index,
                                uint32_t* out_id, double* out_distance) {
  if (!graph || !out_id || !out_distance) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  if (node >= graph->value.size() || index >= graph->value.degree(node)) {
    return fail(MRNG_INVALID_ARGUMENT, "node or neighbor index out of range");
  }
  const mrng::Neighbor& nb = graph->value.neighbors(node)[index];
  *out_id = nb.id;
  *out_distance = nb.dist;
  return MRNG_OK;
}

uint64_t mrng_graph_dataset_checksum(const mrng_graph* graph) {
  return graph->value.meta().dataset_checksum;
}

mrng_status mrng_graph_degree_stats(const mrng_graph* graph, uint32_t* out_min, uint32_t* out_max,
                                    double* out_mean) {
  if (!graph) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    mrng::DegreeStats stats = mrng::degree_stats(graph->value);
    if (out_min) *out_min = stats.min;
    if (out_max) *out_max = stats.max;
    if (out_mean) *out_mean = stats.mean;
  });
}

mrng_status mrng_graph_save(const mrng_graph* graph, const char* path) {
  if (!graph || !path) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] { mrng::save_graph(graph->value, path); });
}

mrng_status mrng_graph_load(const char* path, mrng_graph** out) {
  if (!out || !path) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new mrng_graph{mrng::load_graph(path)}; });
}

void mrng_graph_free(mrng_graph* graph) { delete graph; }

mrng_status mrng_conflicts_save(const mrng_conflicts* conflicts, const mrng_graph* graph,
                                const char* path) {
  if (!conflicts || !graph || !path) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] { mrng::save_conflicts(conflicts->value, graph->value, path); });
}

mrng_status mrng_conflicts_load(const char* path, const mrng_graph* graph, mrng_conflicts** out) {
  if (!out || !path || !graph) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new mrng_conflicts{mrng::load_conflicts(path, graph->value)}; });
}

mrng_status mrng_conflicts_list_length(const mrng_conflicts* conflicts, uint32_t node,
                                       uint32_t edge_index, uint32_t* out_length) {
  if (!conflicts || !out_length) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  if (node >= conflicts->value.size() || edge_index >= conflicts->value.edge_lists(node)) {
    return fail(MRNG_INVALID_ARGUMENT, "node or edge index out of range");
  }
  *out_length = static_cast<uint32_t>(conflicts->value.list(node, edge_index).size());
  return MRNG_OK;
}

mrng_status mrng_conflicts_entry(const mrng_conflicts* conflicts, uint32_t node,
                                 uint32_t edge_index, uint32_t position, uint32_t* out_id,
                                 double* out_distance) {
  if (!conflicts || !out_id || !out_distance) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  if (node >= conflicts->value.size() || edge_index >= conflicts->value.edge_lists(node)) {
    return fail(MRNG_INVALID_ARGUMENT, "node or edge index out of range");
  }
  auto list = conflicts->value.list(node, edge_index);
  if (position >= list.size()) return fail(MRNG_INVALID_ARGUMENT, "position out of range");
  *out_id = list[position].id;
  *out_distance = list[position].dist;
  return MRNG_OK;
}

void mrng_conflicts_free(mrng_conflicts* conflicts) { delete conflicts; }

mrng_status mrng_closer_and_go(const mrng_graph* graph, const mrng_dataset* dataset,
                               uint32_t start, const double* query, mrng_search_result** out) {
  if (!graph || !dataset || !query || !out) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new mrng_search_result{
        mrng::closer_and_go(graph->value, dataset->value, start, query_view(dataset, query))};
  });
}

mrng_status mrng_best_first(const mrng_graph* graph, const mrng_dataset* dataset, uint32_t entry,
                            const double* query, uint64_t budget, uint32_t k,
                            mrng_search_result** out) {
  if (!graph || !dataset || !query || !out) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new mrng_search_result{mrng::best_first(graph->value, dataset->value, entry,
                                                   query_view(dataset, query), budget, k)};
  });
}

mrng_status mrng_search_with_escape(const mrng_graph* graph, const mrng_dataset* dataset,
                                    const mrng_conflicts* conflicts, uint32_t entry,
                                    const double* query, uint64_t budget, uint32_t k,
                                    mrng_search_result** out) {
  if (!graph || !dataset || !conflicts || !query || !out) {
    return fail(MRNG_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    *out = new mrng_search_result{
        mrng::search_with_escape(graph->value, dataset->value, conflicts->value, entry,
                                 query_view(dataset, query), budget, k)};
  });
}

mrng_status mrng_conflict_search(const mrng_dataset* dataset, const mrng_graph* graph,
                                 const mrng_conflicts* conflicts, uint32_t node,
                                 const double* query, uint32_t* out_id) {
  if (!dataset || !graph || !conflicts || !query || !out_id) {
    return fail(MRNG_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    *out_id = mrng::conflict_search(dataset->value, graph->value, conflicts->value, node,
                                    query_view(dataset, query));
  });
}

mrng_status mrng_pick_entry(const mrng_dataset* dataset, uint32_t* out_id) {
  if (!dataset || !out_id) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out_id = mrng::pick_entry(dataset->value); });
}

mrng_status mrng_brute_force_knn(const mrng_dataset* dataset, const double* query, uint32_t k,
                                 uint32_t* out_ids, double* out_distances) {
  if (!dataset || !query || !out_ids || !out_distances) {
    return fail(MRNG_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto hits = mrng::brute_force_knn(dataset->value, query_view(dataset, query), k);
    for (uint32_t i = 0; i < k; ++i) {
      out_ids[i] = hits[i].id;
      out_distances[i] = hits[i].dist;
    }
  });
}

uint32_t mrng_result_candidate_count(const mrng_search_result* result) {
  return static_cast<uint32_t>(result->value.candidates.size());
}

mrng_status mrng_result_candidate(const mrng_search_result* result, uint32_t index,
                                  uint32_t* out_id, double* out_distance) {
  if (!result || !out_id || !out_distance) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  if (index >= result->value.candidates.size()) {
    return fail(MRNG_INVALID_ARGUMENT, "candidate index out of range");
  }
  *out_id = result->value.candidates[index].id;
  *out_distance = result->value.candidates[index].dist;
  return MRNG_OK;
}

uint64_t mrng_result_distance_evals(const mrng_search_result* result) {
  return result->value.distance_evals;
}

uint32_t mrng_result_path_length(const mrng_search_result* result) {
  return static_cast<uint32_t>(result->value.path.size());
}

mrng_status mrng_result_path_node(const mrng_search_result* result, uint32_t index,
                                  uint32_t* out_id) {
  if (!result || !out_id) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  if (index >= result->value.path.size()) {
    return fail(MRNG_INVALID_ARGUMENT, "path index out of range");
  }
  *out_id = result->value.path[index];
  return MRNG_OK;
}

int mrng_result_terminated_at_local_min(const mrng_search_result* result) {
  return result->value.terminated_at_local_min ? 1 : 0;
}

mrng_status mrng_result_trace_json(const mrng_search_result* result, char** out_json) {
  if (!result || !out_json) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out_json = copy_string(mrng::trace_to_json_lines(result->value)); });
}

void mrng_result_free(mrng_search_result* result) { delete result; }

mrng_status mrng_check_monotonic(const mrng_graph* graph, const mrng_dataset* dataset,
                                 int* out_passed, char** out_report_json) {
  if (!graph || !dataset) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    run_check(out_passed, out_report_json, mrng::is_monotonic(graph->value, dataset->value));
  });
}

mrng_status mrng_check_mrng_definition(const mrng_graph* graph, const mrng_dataset* dataset,
                                       int* out_passed, char** out_report_json) {
  if (!graph || !dataset) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    run_check(out_passed, out_report_json,
              mrng::check_mrng_definition(graph->value, dataset->value));
  });
}

mrng_status mrng_check_edge_minimality(const mrng_graph* graph, const mrng_dataset* dataset,
                                       uint64_t sample, int* out_passed, char** out_report_json) {
  if (!graph || !dataset) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    run_check(out_passed, out_report_json,
              mrng::check_edge_minimality(graph->value, dataset->value, sample));
  });
}

mrng_status mrng_check_angle_separation(const mrng_graph* graph, const mrng_dataset* dataset,
                                        int* out_passed, char** out_report_json) {
  if (!graph || !dataset) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    run_check(out_passed, out_report_json,
              mrng::check_angle_separation(graph->value, dataset->value));
  });
}

mrng_status mrng_experiment_run(const mrng_experiment_config* config, char** out_summary_json) {
  if (!config || !config->kind) return fail(MRNG_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    mrng::ExperimentConfig cfg;
    std::string kind = config->kind;
    if (kind == "degree") {
      cfg.kind = mrng::ExperimentKind::degree;
    } else if (kind == "truncation") {
      cfg.kind = mrng::ExperimentKind::truncation;
    } else if (kind == "conflicts") {
      cfg.kind = mrng::ExperimentKind::conflict_multiplicity;
    } else {
      throw mrng::Error(mrng::ErrorCode::invalid_argument, "unknown experiment kind: " + kind);
    }
    if (config->ns && config->ns_len > 0) cfg.ns.assign(config->ns, config->ns + config->ns_len);
    if (config->ds && config->ds_len > 0) cfg.ds.assign(config->ds, config->ds + config->ds_len);
    if (config->degree_bounds && config->degree_bounds_len > 0) {
      cfg.degree_bounds.assign(config->degree_bounds,
                               config->degree_bounds + config->degree_bounds_len);
    }
    if (config->budgets && config->budgets_len > 0) {
      cfg.budgets.assign(config->budgets, config->budgets + config->budgets_len);
    }
    if (config->n_queries > 0) cfg.n_queries = config->n_queries;
    if (config->k > 0) cfg.k = config->k;
    cfg.seed = config->seed;
    if (config->output_path) cfg.output_path = config->output_path;
    if (config->format && std::string(config->format) == "json") {
      cfg.format = mrng::OutputFormat::json;
    }
    cfg.threads = config->threads;
    cfg.force = config->force != 0;

    std::string summary;
    switch (cfg.kind) {
      case mrng::ExperimentKind::degree:
        summary = mrng::degree_json(mrng::run_degree_experiment(cfg));
        break;
      case mrng::ExperimentKind::truncation:
        summary = mrng::accuracy_json(mrng::run_truncation_experiment(cfg));
        break;
      case mrng::ExperimentKind::conflict_multiplicity:
        summary = mrng::conflict_multiplicity_json(mrng::run_conflict_multiplicity_experiment(cfg));
        break;
    }
    if (out_summary_json) *out_summary_json = copy_string(summary);
  });
}

} /* extern "C" */
