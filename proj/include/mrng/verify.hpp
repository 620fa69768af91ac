#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrng/dataset.hpp"
#include "mrng/graph.hpp"

namespace mrng {

struct CheckCounterexample {
  std::vector<uint32_t> ids;  // offending node / pair / edge, smallest first
  double witness = 0.0;       // violated quantity, re-derivable from coordinates
  std::string detail;
};

struct CheckReport {
  bool passed = true;
  std::optional<CheckCounterexample> counterexample;
  uint64_t pairs_checked = 0;
  uint64_t edges_checked = 0;
};

std::string check_report_to_json(const CheckReport& report);

/// Exact k nearest neighbors of q by linear scan, ordered by (distance, id).
/// The ground-truth oracle for every accuracy measurement.
std::vector<Neighbor> brute_force_knn(const Dataset& dataset, PointView q, uint32_t k);

/// Exact monotonicity decision. For every target q in S, keeps only the
/// edges that step strictly closer to q and verifies every node reaches q
/// in that subgraph (reverse reachability from q). Greedy search succeeding
/// is sufficient but not necessary on arbitrary graphs, hence the exact
/// check. O(n * (n + |E|)); desk scale only. Counterexample is the
/// lexicographically smallest broken (start, target) pair.
CheckReport is_monotonic(const ProximityGraph& g, const Dataset& dataset);

/// Both directions of the edge rule for every ordered pair (x, y): the edge
/// x->y exists iff no out-neighbor of x lies strictly inside lune(x, y).
CheckReport check_mrng_definition(const ProximityGraph& g, const Dataset& dataset);

inline constexpr uint64_t kAllEdges = ~0ull;

/// Edge minimality: deleting any edge x->y must break the monotonic path
/// from x to y (deletion breaks exactly that pair). sample < edge count
/// checks that many edges, evenly spaced over the deterministic edge
/// enumeration; kAllEdges checks every edge.
CheckReport check_edge_minimality(const ProximityGraph& g, const Dataset& dataset,
                                  uint64_t sample = kAllEdges);

/// Distinct out-edges of one node in an exact graph subtend at least
/// pi/3 - 1e-9 radians.
CheckReport check_angle_separation(const ProximityGraph& g, const Dataset& dataset);

/// Sampling cross-check of the reach_f threshold: compares the predicate
/// "some sampled point of the ball B_{|vq|}(q) has u strictly inside its
/// lune with v" against "|vu| < |vq| * reach_f(angle)". Samples combine
/// `samples` quasi-uniform interior points with a dense circle on the
/// ball's boundary in the (v, q, u) plane, where boundary witnesses are
/// guaranteed to exist if any witness does. Passes when the predicates
/// agree or |vu| sits within 1e-2 * |vq| of the threshold (sampling
/// resolution band). Requires |uq| >= |vq| > 0.
CheckReport check_reach_threshold_sampling(PointView v, PointView q, PointView u,
                                           uint32_t samples);

}  // namespace mrng
