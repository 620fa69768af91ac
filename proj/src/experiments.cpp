#include "mrng/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "build_internal.hpp"
#include "mrng/build.hpp"
#include "mrng/error.hpp"
#include "mrng/search.hpp"
#include "mrng/verify.hpp"
#include "mrng/version.hpp"
#include "parallel.hpp"

namespace mrng {

namespace {

std::string fmt_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string bound_label(uint32_t bound) {
  return bound == kUnboundedDegree ? "unbounded" : std::to_string(bound);
}

void enforce_cap(uint32_t n, uint32_t cap, bool force, const char* what) {
  if (n > cap && !force) {
    throw Error(ErrorCode::cap_exceeded,
                std::string(what) + " capped at n=" + std::to_string(cap) +
                    " (pass force to override)");
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path);
}

std::string hist_path(const std::string& path) {
  size_t dot = path.find_last_of('.');
  size_t slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + "_hist";
  }
  return path.substr(0, dot) + "_hist" + path.substr(dot);
}

bool same_edges(const ProximityGraph& a, const ProximityGraph& b) {
  if (a.size() != b.size()) return false;
  for (uint32_t v = 0; v < a.size(); ++v) {
    auto la = a.neighbors(v);
    auto lb = b.neighbors(v);
    if (!std::equal(la.begin(), la.end(), lb.begin(), lb.end())) return false;
  }
  return true;
}

}  // namespace

uint64_t query_seed(uint64_t dataset_seed) noexcept {
  return mix64(dataset_seed ^ 0x71c9b7a5e3d2f081ull);
}

DegreeExperimentResult run_degree_experiment(const ExperimentConfig& cfg) {
  DegreeExperimentResult result;
  for (uint32_t n : cfg.ns) {
    enforce_cap(n, cfg.build_cap, cfg.force, "exact build");
    for (uint32_t d : cfg.ds) {
      Dataset dataset = generate_uniform_dataset(n, d, cfg.seed);
      BuildStats stats;
      ProximityGraph g = build_mrng(dataset, cfg.threads, &stats);
      result.cells.push_back({n, d, cfg.seed, degree_stats(g), stats.distance_evals});
    }
  }
  if (!cfg.output_path.empty()) {
    if (cfg.format == OutputFormat::csv) {
      write_file(cfg.output_path, degree_summary_csv(result));
      write_file(hist_path(cfg.output_path), degree_histogram_csv(result));
    } else {
      write_file(cfg.output_path, degree_json(result));
    }
  }
  return result;
}

AccuracyTable run_truncation_experiment(const ExperimentConfig& cfg) {
  if (cfg.budgets.empty()) {
    throw Error(ErrorCode::invalid_argument, "truncation experiment needs budgets");
  }
  if (cfg.n_queries == 0) throw Error(ErrorCode::invalid_argument, "need at least one query");

  std::vector<uint32_t> bounds = cfg.degree_bounds;
  if (bounds.empty()) bounds.push_back(kUnboundedDegree);

  AccuracyTable table;
  for (uint32_t n : cfg.ns) {
    enforce_cap(n, cfg.build_cap, cfg.force, "exact build");
    for (uint32_t d : cfg.ds) {
      Dataset dataset = generate_uniform_dataset(n, d, cfg.seed);
      detail::DistanceMatrix matrix(dataset, cfg.threads);
      GraphMeta meta;
      meta.seed = cfg.seed;
      ProximityGraph exact =
          detail::build_full_pool(dataset, matrix, kUnboundedDegree, meta, cfg.threads);

      std::vector<double> queries = generate_uniform_points(cfg.n_queries, d, query_seed(cfg.seed));
      uint32_t entry = pick_entry(dataset);
      std::vector<uint32_t> truth(cfg.n_queries);
      detail::parallel_for(cfg.n_queries, cfg.threads, [&](uint64_t qi) {
        PointView q(queries.data() + qi * d, d);
        truth[qi] = brute_force_knn(dataset, q, 1).front().id;
      });

      for (uint32_t bound : bounds) {
        ProximityGraph bounded = bound == kUnboundedDegree ? exact : truncated(exact, bound);
        if (bound != kUnboundedDegree) {
          // truncation must equal an independent degree-bounded build
          ProximityGraph rebuilt =
              detail::build_full_pool(dataset, matrix, bound, bounded.meta(), cfg.threads);
          if (!same_edges(bounded, rebuilt)) {
            throw Error(ErrorCode::invalid_argument,
                        "truncated graph differs from direct bounded build");
          }
        }
        for (uint32_t budget : cfg.budgets) {
          std::vector<uint8_t> hits(cfg.n_queries, 0);
          detail::parallel_for(cfg.n_queries, cfg.threads, [&](uint64_t qi) {
            PointView q(queries.data() + qi * d, d);
            SearchResult res = best_first(bounded, dataset, entry, q, budget, cfg.k);
            hits[qi] = res.candidates.front().id == truth[qi] ? 1 : 0;
          });
          uint64_t hit_count = 0;
          for (uint8_t h : hits) hit_count += h;
          table.rows.push_back({n, d, cfg.seed, bound, budget, cfg.n_queries,
                                static_cast<double>(hit_count) / cfg.n_queries});
        }
      }
    }
  }
  if (!cfg.output_path.empty()) {
    write_file(cfg.output_path,
               cfg.format == OutputFormat::csv ? accuracy_csv(table) : accuracy_json(table));
  }
  return table;
}

ConflictMultiplicityResult run_conflict_multiplicity_experiment(const ExperimentConfig& cfg) {
  ConflictMultiplicityResult result;
  for (uint32_t n : cfg.ns) {
    enforce_cap(n, cfg.conflict_cap, cfg.force, "conflict scan");
    for (uint32_t d : cfg.ds) {
      Dataset dataset = generate_uniform_dataset(n, d, cfg.seed);
      detail::DistanceMatrix matrix(dataset, cfg.threads);
      GraphMeta meta;
      meta.seed = cfg.seed;
      ProximityGraph g =
          detail::build_full_pool(dataset, matrix, kUnboundedDegree, meta, cfg.threads);

      uint32_t max_deg = degree_stats(g).max;
      std::vector<std::atomic<uint64_t>> hist(max_deg + 1);
      for (auto& h : hist) h.store(0);

      // k_v(w) per (v, w) pair without materializing the conflict lists:
      // only edges shorter than |vw| can have w as a conflicting node, and
      // adjacency is sorted by distance, so each pair scans a prefix.
      detail::parallel_for(n, cfg.threads, [&](uint64_t vi) {
        auto v = static_cast<uint32_t>(vi);
        auto edges = g.neighbors(v);
        const double* v_row = matrix.row(v);
        for (uint32_t w = 0; w < n; ++w) {
          if (w == v) continue;
          double dvw = v_row[w];
          uint32_t count = 0;
          for (const Neighbor& edge : edges) {
            if (!(edge.dist < dvw)) break;
            if (matrix(edge.id, w) < dvw) ++count;
          }
          if (count > 0) hist[count].fetch_add(1, std::memory_order_relaxed);
        }
      });

      ConflictMultiplicityCell cell;
      cell.n = n;
      cell.d = d;
      cell.seed = cfg.seed;
      cell.histogram.resize(hist.size());
      uint64_t pairs = 0, weighted = 0;
      for (size_t k = 0; k < hist.size(); ++k) {
        cell.histogram[k] = hist[k].load();
        pairs += cell.histogram[k];
        weighted += k * cell.histogram[k];
      }
      cell.pair_count = pairs;
      cell.mean_multiplicity = pairs == 0 ? 0.0 : static_cast<double>(weighted) / pairs;
      result.cells.push_back(std::move(cell));
    }
  }
  if (!cfg.output_path.empty()) {
    write_file(cfg.output_path, cfg.format == OutputFormat::csv
                                    ? conflict_multiplicity_csv(result)
                                    : conflict_multiplicity_json(result));
  }
  return result;
}

std::string degree_summary_csv(const DegreeExperimentResult& result) {
  std::string out = "version,n,d,seed,min_degree,mean_degree,max_degree,distance_evals\n";
  for (const DegreeCell& cell : result.cells) {
    out += std::string(kVersion) + "," + std::to_string(cell.n) + "," + std::to_string(cell.d) +
           "," + std::to_string(cell.seed) + "," + std::to_string(cell.stats.min) + "," +
           fmt_double(cell.stats.mean) + "," + std::to_string(cell.stats.max) + "," +
           std::to_string(cell.distance_evals) + "\n";
  }
  return out;
}

std::string degree_histogram_csv(const DegreeExperimentResult& result) {
  std::string out = "version,n,d,seed,degree,count\n";
  for (const DegreeCell& cell : result.cells) {
    for (size_t deg = 0; deg < cell.stats.histogram.size(); ++deg) {
      if (cell.stats.histogram[deg] == 0) continue;
      out += std::string(kVersion) + "," + std::to_string(cell.n) + "," + std::to_string(cell.d) +
             "," + std::to_string(cell.seed) + "," + std::to_string(deg) + "," +
             std::to_string(cell.stats.histogram[deg]) + "\n";
    }
  }
  return out;
}

std::string accuracy_csv(const AccuracyTable& table) {
  std::string out = "version,n,d,seed,degree_bound,budget,queries,mean_top1_accuracy\n";
  for (const AccuracyRow& row : table.rows) {
    out += std::string(kVersion) + "," + std::to_string(row.n) + "," + std::to_string(row.d) +
           "," + std::to_string(row.seed) + "," + bound_label(row.degree_bound) + "," +
           std::to_string(row.budget) + "," + std::to_string(row.queries) + "," +
           fmt_double(row.mean_top1_accuracy) + "\n";
  }
  return out;
}

std::string conflict_multiplicity_csv(const ConflictMultiplicityResult& result) {
  std::string out = "version,n,d,seed,multiplicity,pairs\n";
  for (const ConflictMultiplicityCell& cell : result.cells) {
    for (size_t k = 1; k < cell.histogram.size(); ++k) {
      if (cell.histogram[k] == 0) continue;
      out += std::string(kVersion) + "," + std::to_string(cell.n) + "," + std::to_string(cell.d) +
             "," + std::to_string(cell.seed) + "," + std::to_string(k) + "," +
             std::to_string(cell.histogram[k]) + "\n";
    }
  }
  return out;
}

std::string degree_json(const DegreeExperimentResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const DegreeCell& cell : result.cells) {
    nlohmann::json hist = nlohmann::json::array();
    for (size_t deg = 0; deg < cell.stats.histogram.size(); ++deg) {
      if (cell.stats.histogram[deg] == 0) continue;
      hist.push_back({{"degree", deg}, {"count", cell.stats.histogram[deg]}});
    }
    cells.push_back({{"n", cell.n},
                     {"d", cell.d},
                     {"seed", cell.seed},
                     {"min_degree", cell.stats.min},
                     {"mean_degree", cell.stats.mean},
                     {"max_degree", cell.stats.max},
                     {"distance_evals", cell.distance_evals},
                     {"histogram", hist}});
  }
  return nlohmann::json{{"version", kVersion}, {"experiment", "degree"}, {"cells", cells}}.dump(2) +
         "\n";
}

std::string accuracy_json(const AccuracyTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const AccuracyRow& row : table.rows) {
    rows.push_back({{"n", row.n},
                    {"d", row.d},
                    {"seed", row.seed},
                    {"degree_bound", bound_label(row.degree_bound)},
                    {"budget", row.budget},
                    {"queries", row.queries},
                    {"mean_top1_accuracy", row.mean_top1_accuracy}});
  }
  return nlohmann::json{{"version", kVersion}, {"experiment", "truncation"}, {"rows", rows}}.dump(
             2) +
         "\n";
}

std::string conflict_multiplicity_json(const ConflictMultiplicityResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const ConflictMultiplicityCell& cell : result.cells) {
    nlohmann::json hist = nlohmann::json::array();
    for (size_t k = 1; k < cell.histogram.size(); ++k) {
      if (cell.histogram[k] == 0) continue;
      hist.push_back({{"multiplicity", k}, {"pairs", cell.histogram[k]}});
    }
    cells.push_back({{"n", cell.n},
                     {"d", cell.d},
                     {"seed", cell.seed},
                     {"pair_count", cell.pair_count},
                     {"mean_multiplicity", cell.mean_multiplicity},
                     {"histogram", hist}});
  }
  return nlohmann::json{
             {"version", kVersion}, {"experiment", "conflict_multiplicity"}, {"cells", cells}}
             .dump(2) +
         "\n";
}

}  // namespace mrng
