#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrng/dataset.hpp"
#include "mrng/graph.hpp"

namespace mrng {

enum class TraceAction : uint8_t {
  visit,   // distance to the query evaluated
  expand,  // node popped and its neighborhood scanned
  escape,  // node reached through a conflict-set jump
};

struct TraceEvent {
  uint32_t step = 0;
  uint32_t node = 0;
  double distance = 0.0;
  TraceAction action = TraceAction::visit;
};

struct SearchResult {
  std::vector<Neighbor> candidates;  // ascending (distance, id)
  uint64_t distance_evals = 0;       // query-to-node evaluations, each node once
  std::vector<uint32_t> path;
  bool terminated_at_local_min = false;
  std::vector<TraceEvent> trace;
};

std::string trace_to_json_lines(const SearchResult& result);

/// Greedy walk: from each node step to the improving out-neighbor closest to
/// q (ties by id) until no out-neighbor is strictly closer. path holds the
/// walk, which has strictly decreasing distances to q; candidates holds
/// every node whose distance was evaluated. Always terminates.
SearchResult closer_and_go(const ProximityGraph& g, const Dataset& dataset,
                           uint32_t start, PointView q);

/// Budgeted best-first search. Maintains a pool ordered by (distance, id),
/// repeatedly expands the closest unexpanded candidate, and evaluates its
/// unseen out-neighbors until the pool is exhausted or distance_evals
/// reaches budget (an evaluation that would exceed the budget is not
/// performed; evaluating the entry node costs the first unit). Returns the
/// k closest evaluated nodes. terminated_at_local_min is set when the best
/// node seen had its whole neighborhood evaluated and nothing improved.
SearchResult best_first(const ProximityGraph& g, const Dataset& dataset,
                        uint32_t entry, PointView q, uint64_t budget, uint32_t k);

/// Escape step at a local minimum v: scans the conflict sets of the
/// out-edges of v that pass the reach_f angle filter, restricted to
/// conflicting nodes within twice delta(v, q), and returns the node closest
/// to q among v and everything scanned (ties by id). On the exact graph
/// with full conflict sets this is the true nearest neighbor of q. Throws
/// not_local_minimum if some out-neighbor of v improves on v.
uint32_t conflict_search(const Dataset& dataset, const ProximityGraph& g,
                         const ConflictMap& conflicts, uint32_t v, PointView q);

/// Best-first search that, whenever the pool runs dry at a verified local
/// minimum with budget to spare, jumps through that node's conflict sets
/// and resumes. Escape evaluations draw from the same budget.
SearchResult search_with_escape(const ProximityGraph& g, const Dataset& dataset,
                                const ConflictMap& conflicts, uint32_t entry,
                                PointView q, uint64_t budget, uint32_t k);

/// Approximate medoid: the point closest to the coordinate-wise centroid
/// (ties by id). The deterministic default entry point for searches.
uint32_t pick_entry(const Dataset& dataset);

}  // namespace mrng
