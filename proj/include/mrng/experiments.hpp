#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrng/dataset.hpp"
#include "mrng/graph.hpp"

namespace mrng {

enum class ExperimentKind {
  degree,                 // degree stats + histogram over an (n, d) grid
  truncation,             // top-1 accuracy over (degree bound, budget) cells
  conflict_multiplicity,  // histogram of per-pair conflict multiplicities
};

enum class OutputFormat { csv, json };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::degree;
  std::vector<uint32_t> ns{5000};
  std::vector<uint32_t> ds{10};
  std::vector<uint32_t> degree_bounds;  // kUnboundedDegree allowed; empty = unbounded only
  std::vector<uint32_t> budgets;
  uint32_t n_queries = 200;
  uint32_t k = 1;
  uint64_t seed = 0;
  std::string output_path;  // empty = no file, results returned only
  OutputFormat format = OutputFormat::csv;
  uint32_t threads = 0;
  bool force = false;          // override the desk-scale caps
  uint32_t build_cap = 6000;   // largest n for O(n^2) exact builds
  uint32_t conflict_cap = 3000;  // largest n for conflict scans
};

/// Queries are drawn from a stream derived from the dataset seed so a
/// config fully determines every byte of the output.
uint64_t query_seed(uint64_t dataset_seed) noexcept;

struct DegreeCell {
  uint32_t n = 0;
  uint32_t d = 0;
  uint64_t seed = 0;
  DegreeStats stats;
  uint64_t distance_evals = 0;
};

struct DegreeExperimentResult {
  std::vector<DegreeCell> cells;
};

/// Builds the exact graph per (n, d) cell and reports min/mean/max degree
/// plus the full histogram. Writes a summary table to output_path and the
/// histogram next to it (suffix "_hist").
DegreeExperimentResult run_degree_experiment(const ExperimentConfig& cfg);

struct AccuracyRow {
  uint32_t n = 0;
  uint32_t d = 0;
  uint64_t seed = 0;
  uint32_t degree_bound = kUnboundedDegree;
  uint32_t budget = 0;
  uint32_t queries = 0;
  double mean_top1_accuracy = 0.0;
};

struct AccuracyTable {
  std::vector<AccuracyRow> rows;
};

/// Builds the exact graph once per (n, d) cell, derives every bounded
/// variant by adjacency truncation (cross-checked against an independent
/// bounded build before any accuracy is measured), and evaluates mean top-1
/// accuracy per (bound, budget) against the brute-force oracle. Searches
/// start at the medoid.
AccuracyTable run_truncation_experiment(const ExperimentConfig& cfg);

struct ConflictMultiplicityCell {
  uint32_t n = 0;
  uint32_t d = 0;
  uint64_t seed = 0;
  // histogram[k] = number of (v, w) pairs where w conflicts with exactly k
  // out-edges of v; index 0 unused.
  std::vector<uint64_t> histogram;
  uint64_t pair_count = 0;
  double mean_multiplicity = 0.0;
};

struct ConflictMultiplicityResult {
  std::vector<ConflictMultiplicityCell> cells;
};

/// Streams the per-pair conflict multiplicities of the exact graph without
/// materializing conflict lists (their total size is quadratic).
ConflictMultiplicityResult run_conflict_multiplicity_experiment(const ExperimentConfig& cfg);

// Deterministic renderers: identical config and data give identical bytes.
std::string degree_summary_csv(const DegreeExperimentResult& result);
std::string degree_histogram_csv(const DegreeExperimentResult& result);
std::string accuracy_csv(const AccuracyTable& table);
std::string conflict_multiplicity_csv(const ConflictMultiplicityResult& result);
std::string degree_json(const DegreeExperimentResult& result);
std::string accuracy_json(const AccuracyTable& table);
std::string conflict_multiplicity_json(const ConflictMultiplicityResult& result);

}  // namespace mrng
