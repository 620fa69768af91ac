#include "mrng/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <nlohmann/json.hpp>

#include "mrng/error.hpp"
#include "mrng/geometry.hpp"

namespace mrng {

namespace {

constexpr uint64_t kNoBudget = ~0ull;

bool closer(double da, uint32_t a, double db, uint32_t b) {
  return da != db ? da < db : a < b;
}

void validate_pair(const ProximityGraph& g, const Dataset& dataset, PointView q) {
  if (g.meta().dataset_checksum != dataset.checksum()) {
    throw Error(ErrorCode::checksum_mismatch, "graph was not built over this dataset");
  }
  if (q.size() != dataset.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "query dimension does not match dataset");
  }
  for (double c : q) {
    if (!std::isfinite(c)) throw Error(ErrorCode::invalid_argument, "query must be finite");
  }
}

// Per-query evaluation record: each node's distance to q is computed at most
// once and only while the budget allows it.
struct QueryContext {
  const Dataset& dataset;
  PointView q;
  std::vector<double> dist;
  std::vector<uint8_t> seen;
  std::vector<uint32_t> evaluated;
  uint64_t evals = 0;
  uint64_t budget = kNoBudget;
  std::vector<TraceEvent>* trace = nullptr;

  QueryContext(const Dataset& ds, PointView query, uint64_t budget_limit)
      : dataset(ds), q(query), dist(ds.size(), 0.0), seen(ds.size(), 0), budget(budget_limit) {}

  bool exhausted() const { return evals >= budget; }

  // False only when the node is unseen and the budget is spent.
  bool evaluate(uint32_t node, double& out) {
    if (seen[node]) {
      out = dist[node];
      return true;
    }
    if (evals >= budget) return false;
    out = distance(dataset.point(node), q);
    dist[node] = out;
    seen[node] = 1;
    evaluated.push_back(node);
    ++evals;
    if (trace) {
      trace->push_back({static_cast<uint32_t>(trace->size()), node, out, TraceAction::visit});
    }
    return true;
  }

  std::vector<Neighbor> sorted_candidates(uint32_t k = 0) const {
    std::vector<Neighbor> all;
    all.reserve(evaluated.size());
    for (uint32_t id : evaluated) all.push_back({id, dist[id]});
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
      return closer(a.dist, a.id, b.dist, b.id);
    });
    if (k > 0 && all.size() > k) all.resize(k);
    return all;
  }
};

struct BestFirstDriver {
  const ProximityGraph& g;
  QueryContext& ctx;
  std::vector<TraceEvent>& trace;

  using Entry = std::pair<double, uint32_t>;
  struct EntryGreater {
    bool operator()(const Entry& a, const Entry& b) const {
      return !closer(a.first, a.second, b.first, b.second);
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, EntryGreater> pool;
  std::vector<uint8_t> expanded;
  std::vector<uint8_t> fully_expanded;
  std::vector<uint32_t> expansion_order;

  BestFirstDriver(const ProximityGraph& graph, QueryContext& context,
                  std::vector<TraceEvent>& trace_out)
      : g(graph), ctx(context), trace(trace_out), expanded(graph.size(), 0),
        fully_expanded(graph.size(), 0) {
    ctx.trace = &trace;
  }

  void seed(uint32_t node) { pool.push({ctx.dist[node], node}); }

  // Expands until the pool is drained or the budget is spent.
  void run() {
    while (!pool.empty()) {
      auto [dv, v] = pool.top();
      pool.pop();
      expanded[v] = 1;
      expansion_order.push_back(v);
      trace.push_back({static_cast<uint32_t>(trace.size()), v, dv, TraceAction::expand});
      bool complete = true;
      for (const Neighbor& nb : g.neighbors(v)) {
        if (ctx.seen[nb.id]) continue;
        double du = 0.0;
        if (!ctx.evaluate(nb.id, du)) {
          complete = false;
          break;
        }
        pool.push({du, nb.id});
      }
      fully_expanded[v] = complete;
      if (!complete) return;  // budget exhausted mid-expansion
      if (ctx.exhausted() && !pool.empty()) return;
    }
  }

  uint32_t best() const {
    uint32_t best_id = ctx.evaluated.front();
    double best_dist = ctx.dist[best_id];
    for (uint32_t id : ctx.evaluated) {
      if (closer(ctx.dist[id], id, best_dist, best_id)) {
        best_id = id;
        best_dist = ctx.dist[id];
      }
    }
    return best_id;
  }

  // The best node seen is a verified local minimum when its whole
  // neighborhood was evaluated and nothing improved on it.
  bool best_is_local_min() const {
    uint32_t b = best();
    return expanded[b] && fully_expanded[b];
  }
};

void validate_entry(const ProximityGraph& g, uint32_t entry) {
  if (entry >= g.size()) throw Error(ErrorCode::invalid_argument, "entry id out of range");
}

}  // namespace

SearchResult closer_and_go(const ProximityGraph& g, const Dataset& dataset, uint32_t start,
                           PointView q) {
  validate_pair(g, dataset, q);
  validate_entry(g, start);

  SearchResult result;
  QueryContext ctx(dataset, q, kNoBudget);
  ctx.trace = &result.trace;

  double dv = 0.0;
  ctx.evaluate(start, dv);
  result.path.push_back(start);
  uint32_t v = start;

  for (;;) {
    result.trace.push_back(
        {static_cast<uint32_t>(result.trace.size()), v, dv, TraceAction::expand});
    bool improved = false;
    uint32_t next = 0;
    double next_dist = 0.0;
    for (const Neighbor& nb : g.neighbors(v)) {
      double du = 0.0;
      ctx.evaluate(nb.id, du);
      if (du < dv && (!improved || closer(du, nb.id, next_dist, next))) {
        improved = true;
        next = nb.id;
        next_dist = du;
      }
    }
    if (!improved) break;
    v = next;
    dv = next_dist;
    result.path.push_back(v);
  }

  result.terminated_at_local_min = true;
  result.distance_evals = ctx.evals;
  result.candidates = ctx.sorted_candidates();
  return result;
}

SearchResult best_first(const ProximityGraph& g, const Dataset& dataset, uint32_t entry,
                        PointView q, uint64_t budget, uint32_t k) {
  validate_pair(g, dataset, q);
  validate_entry(g, entry);
  if (budget < 1) throw Error(ErrorCode::invalid_argument, "budget must be >= 1");
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be >= 1");

  SearchResult result;
  QueryContext ctx(dataset, q, budget);
  BestFirstDriver driver(g, ctx, result.trace);

  double de = 0.0;
  ctx.evaluate(entry, de);
  driver.seed(entry);
  driver.run();

  result.distance_evals = ctx.evals;
  result.candidates = ctx.sorted_candidates(k);
  result.path = std::move(driver.expansion_order);
  result.terminated_at_local_min = driver.best_is_local_min();
  return result;
}

namespace {

// Shared by the public conflict_search and the escape path: scans the
// filtered conflict sets of local minimum v and returns the closest node
// found (v itself when nothing improves). Budget-limited through ctx.
uint32_t conflict_scan(const Dataset& dataset, const ProximityGraph& g,
                       const ConflictMap& conflicts, uint32_t v, QueryContext& ctx,
                       BestFirstDriver* driver) {
  double r = 0.0;
  ctx.evaluate(v, r);
  if (r == 0.0) return v;

  auto pv = dataset.point(v);
  uint32_t best_id = v;
  double best_dist = r;
  auto edges = g.neighbors(v);
  for (uint32_t e = 0; e < edges.size(); ++e) {
    const Neighbor& edge = edges[e];
    double theta = angle_at(pv, ctx.q, dataset.point(edge.id));
    if (!(edge.dist < r * reach_f(theta))) continue;
    for (const Neighbor& conflict : conflicts.list(v, e)) {
      if (!(conflict.dist < 2.0 * r)) break;  // lists ascend by distance to v
      bool fresh = !ctx.seen[conflict.id];
      double dwq = 0.0;
      if (!ctx.evaluate(conflict.id, dwq)) return best_id;
      if (driver && fresh) driver->pool.push({dwq, conflict.id});
      if (closer(dwq, conflict.id, best_dist, best_id)) {
        best_id = conflict.id;
        best_dist = dwq;
      }
    }
  }
  return best_id;
}

void validate_conflicts(const ProximityGraph& g, const ConflictMap& conflicts) {
  if (!conflicts.matches(g)) {
    throw Error(ErrorCode::checksum_mismatch, "conflict map does not belong to this graph");
  }
}

}  // namespace

uint32_t conflict_search(const Dataset& dataset, const ProximityGraph& g,
                         const ConflictMap& conflicts, uint32_t v, PointView q) {
  validate_pair(g, dataset, q);
  validate_entry(g, v);
  validate_conflicts(g, conflicts);

  QueryContext ctx(dataset, q, kNoBudget);
  double dv = 0.0;
  ctx.evaluate(v, dv);
  for (const Neighbor& nb : g.neighbors(v)) {
    double du = 0.0;
    ctx.evaluate(nb.id, du);
    if (du < dv) {
      throw Error(ErrorCode::not_local_minimum,
                  "node " + std::to_string(v) + " has an improving out-neighbor");
    }
  }
  return conflict_scan(dataset, g, conflicts, v, ctx, nullptr);
}

SearchResult search_with_escape(const ProximityGraph& g, const Dataset& dataset,
                                const ConflictMap& conflicts, uint32_t entry, PointView q,
                                uint64_t budget, uint32_t k) {
  validate_pair(g, dataset, q);
  validate_entry(g, entry);
  validate_conflicts(g, conflicts);
  if (budget < 1) throw Error(ErrorCode::invalid_argument, "budget must be >= 1");
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be >= 1");

  SearchResult result;
  QueryContext ctx(dataset, q, budget);
  BestFirstDriver driver(g, ctx, result.trace);

  double de = 0.0;
  ctx.evaluate(entry, de);
  driver.seed(entry);
  driver.run();

  std::vector<uint8_t> escaped(g.size(), 0);
  while (!ctx.exhausted() && driver.pool.empty()) {
    uint32_t v = driver.best();
    if (!driver.best_is_local_min() || escaped[v]) break;
    escaped[v] = 1;
    uint32_t w = conflict_scan(dataset, g, conflicts, v, ctx, &driver);
    if (w != v) {
      result.trace.push_back(
          {static_cast<uint32_t>(result.trace.size()), w, ctx.dist[w], TraceAction::escape});
    }
    driver.run();  // drain whatever the scan surfaced
  }

  result.distance_evals = ctx.evals;
  result.candidates = ctx.sorted_candidates(k);
  result.path = std::move(driver.expansion_order);
  result.terminated_at_local_min = driver.best_is_local_min();
  return result;
}

uint32_t pick_entry(const Dataset& dataset) {
  uint32_t n = dataset.size();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "empty dataset");
  uint32_t d = dataset.dim();
  std::vector<double> centroid(d, 0.0);
  for (uint32_t i = 0; i < n; ++i) {
    auto p = dataset.point(i);
    for (uint32_t j = 0; j < d; ++j) centroid[j] += p[j];
  }
  for (uint32_t j = 0; j < d; ++j) centroid[j] /= n;

  uint32_t best = 0;
  double best_dist = distance(dataset.point(0), centroid);
  for (uint32_t i = 1; i < n; ++i) {
    double dist_i = distance(dataset.point(i), centroid);
    if (dist_i < best_dist) {
      best = i;
      best_dist = dist_i;
    }
  }
  return best;
}

std::string trace_to_json_lines(const SearchResult& result) {
  std::string out;
  for (const TraceEvent& ev : result.trace) {
    nlohmann::json line;
    line["step"] = ev.step;
    line["node"] = ev.node;
    line["distance"] = ev.distance;
    switch (ev.action) {
      case TraceAction::visit: line["action"] = "visit"; break;
      case TraceAction::expand: line["action"] = "expand"; break;
      case TraceAction::escape: line["action"] = "escape"; break;
    }
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace mrng
