#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mrng/dataset.hpp"
#include "mrng/graph.hpp"

namespace mrng {

struct BuildParams {
  uint32_t degree_bound = kUnboundedDegree;
  PoolKind pool = PoolKind::full;
  uint32_t pool_size = 0;  // knn pool size l; ignored for full pools
  bool record_conflicts = false;
  uint64_t seed = 0;   // recorded in graph meta, not consumed by the builder
  uint32_t threads = 0;  // 0 = hardware concurrency
};

struct BuildStats {
  uint64_t distance_evals = 0;       // edge-selection distance computations
  uint64_t pool_distance_evals = 0;  // kNN pool generation, reported separately
  double wall_ms = 0.0;
};

struct BuildOutput {
  ProximityGraph graph;
  std::optional<ConflictMap> conflicts;
  BuildStats stats;
};

/// Exact graph: every node screens every other node, unbounded degree.
/// For each node x the candidates are scanned in increasing distance from x
/// and y is accepted iff delta(x, y) < delta(r, y) for every neighbor r
/// accepted so far. Candidate order ties are broken by id, which makes the
/// builder total on adversarial inputs; for distinct random points the
/// result is the unique graph satisfying the edge rule. Exactly n(n-1)
/// distance evaluations are performed (each ordered pair once, during the
/// scan of its source node); the acceptance checks reuse those values.
ProximityGraph build_mrng(const Dataset& dataset, uint32_t threads = 0,
                          BuildStats* stats = nullptr);

/// Degree-bounded, pool-restricted variant with explicit per-node candidate
/// pools. pools[x] must not contain x or out-of-range ids. Per-node results
/// are independent, so thread count never changes the output.
ProximityGraph build_generalized(const Dataset& dataset, const BuildParams& params,
                                 const std::vector<std::vector<uint32_t>>& pools,
                                 BuildStats* stats = nullptr);

struct KnnPoolsResult {
  std::vector<std::vector<uint32_t>> pools;  // ascending (distance, id)
  uint64_t distance_evals = 0;
};

/// Exact l nearest neighbors of every node by brute force.
KnnPoolsResult knn_pools(const Dataset& dataset, uint32_t l);

/// Full driver: derives pools from params (full or knn), builds the graph,
/// and optionally computes the conflict map.
BuildOutput build(const Dataset& dataset, const BuildParams& params);

/// Conflicting nodes of every edge by exhaustive scan over the dataset.
/// Fails on a graph whose dataset checksum does not match.
ConflictMap compute_conflicts(const Dataset& dataset, const ProximityGraph& g,
                              uint32_t threads = 0);

}  // namespace mrng
