#include "mrng/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include <nlohmann/json.hpp>

#include "mrng/error.hpp"
#include "mrng/geometry.hpp"

namespace mrng {

namespace {

constexpr double kPi = std::numbers::pi;

void check_graph_dataset(const ProximityGraph& g, const Dataset& dataset) {
  if (g.meta().dataset_checksum != dataset.checksum()) {
    throw Error(ErrorCode::checksum_mismatch, "graph was not built over this dataset");
  }
}

bool closer(double da, uint32_t a, double db, uint32_t b) {
  return da != db ? da < db : a < b;
}

}  // namespace

std::vector<Neighbor> brute_force_knn(const Dataset& dataset, PointView q, uint32_t k) {
  uint32_t n = dataset.size();
  if (k < 1 || k > n) throw Error(ErrorCode::invalid_argument, "k must be in [1, n]");
  if (q.size() != dataset.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "query dimension does not match dataset");
  }
  std::vector<Neighbor> all;
  all.reserve(n);
  for (uint32_t i = 0; i < n; ++i) all.push_back({i, distance(dataset.point(i), q)});
  std::partial_sort(all.begin(), all.begin() + k, all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      return closer(a.dist, a.id, b.dist, b.id);
                    });
  all.resize(k);
  return all;
}

CheckReport is_monotonic(const ProximityGraph& g, const Dataset& dataset) {
  check_graph_dataset(g, dataset);
  uint32_t n = g.size();
  CheckReport report;

  // Reverse adjacency once; per target, walk improving edges backwards.
  std::vector<std::vector<uint32_t>> in_edges(n);
  for (uint32_t v = 0; v < n; ++v) {
    for (const Neighbor& nb : g.neighbors(v)) in_edges[nb.id].push_back(v);
  }

  bool have_failure = false;
  uint32_t worst_p = 0, worst_q = 0;

  std::vector<double> dist_to_target(n);
  std::vector<uint8_t> reached(n);
  std::deque<uint32_t> frontier;

  for (uint32_t target = 0; target < n; ++target) {
    auto tq = dataset.point(target);
    for (uint32_t v = 0; v < n; ++v) dist_to_target[v] = distance(dataset.point(v), tq);
    std::fill(reached.begin(), reached.end(), 0);
    frontier.clear();
    reached[target] = 1;
    frontier.push_back(target);
    uint32_t count = 1;
    while (!frontier.empty()) {
      uint32_t y = frontier.front();
      frontier.pop_front();
      for (uint32_t u : in_edges[y]) {
        if (!reached[u] && dist_to_target[y] < dist_to_target[u]) {
          reached[u] = 1;
          ++count;
          frontier.push_back(u);
        }
      }
    }
    report.pairs_checked += n;
    if (count < n) {
      uint32_t p = 0;
      while (reached[p]) ++p;
      // keep the lexicographically smallest broken (start, target) pair
      if (!have_failure || p < worst_p || (p == worst_p && target < worst_q)) {
        worst_p = p;
        worst_q = target;
      }
      have_failure = true;
    }
  }

  if (have_failure) {
    report.passed = false;
    report.counterexample = CheckCounterexample{
        {worst_p, worst_q},
        distance(dataset.point(worst_p), dataset.point(worst_q)),
        "no monotonic path from first id to second"};
  }
  return report;
}

CheckReport check_mrng_definition(const ProximityGraph& g, const Dataset& dataset) {
  check_graph_dataset(g, dataset);
  uint32_t n = g.size();
  CheckReport report;

  std::vector<double> matrix(static_cast<size_t>(n) * n, 0.0);
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = 0; j < n; ++j) {
      if (j != i) matrix[static_cast<size_t>(i) * n + j] = distance(dataset.point(i), dataset.point(j));
    }
  }
  auto dist = [&](uint32_t i, uint32_t j) { return matrix[static_cast<size_t>(i) * n + j]; };

  std::vector<uint8_t> is_neighbor(n, 0);
  for (uint32_t x = 0; x < n; ++x) {
    auto edges = g.neighbors(x);
    for (const Neighbor& nb : edges) is_neighbor[nb.id] = 1;

    for (uint32_t y = 0; y < n; ++y) {
      if (y == x) continue;
      ++report.pairs_checked;
      double dxy = dist(x, y);
      bool blocked = false;
      for (const Neighbor& z : edges) {
        if (!(z.dist < dxy)) break;  // ascending; nothing farther can block
        if (dist(z.id, y) < dxy) {
          blocked = true;
          break;
        }
      }
      bool present = is_neighbor[y] != 0;
      if (present == blocked) {
        report.passed = false;
        report.counterexample = CheckCounterexample{
            {x, y},
            dxy,
            present ? "edge present but a neighbor lies inside the lune"
                    : "edge absent although no neighbor lies inside the lune"};
        for (const Neighbor& nb : edges) is_neighbor[nb.id] = 0;
        return report;
      }
    }
    for (const Neighbor& nb : edges) is_neighbor[nb.id] = 0;
  }
  return report;
}

namespace {

// Is there a strictly-decreasing-distance path from x to y when the edge
// x->y is removed?
bool monotone_reachable_without_edge(const ProximityGraph& g, const Dataset& dataset,
                                     uint32_t x, uint32_t y) {
  uint32_t n = g.size();
  auto py = dataset.point(y);
  std::vector<double> dist_to_y(n);
  for (uint32_t v = 0; v < n; ++v) dist_to_y[v] = distance(dataset.point(v), py);

  std::vector<uint8_t> visited(n, 0);
  std::deque<uint32_t> frontier;
  visited[x] = 1;
  frontier.push_back(x);
  while (!frontier.empty()) {
    uint32_t v = frontier.front();
    frontier.pop_front();
    for (const Neighbor& nb : g.neighbors(v)) {
      if (v == x && nb.id == y) continue;  // the deleted edge
      if (visited[nb.id] || !(dist_to_y[nb.id] < dist_to_y[v])) continue;
      if (nb.id == y) return true;
      visited[nb.id] = 1;
      frontier.push_back(nb.id);
    }
  }
  return false;
}

}  // namespace

CheckReport check_edge_minimality(const ProximityGraph& g, const Dataset& dataset,
                                  uint64_t sample) {
  check_graph_dataset(g, dataset);
  CheckReport report;

  std::vector<std::pair<uint32_t, uint32_t>> edges;
  edges.reserve(g.edge_count());
  for (uint32_t v = 0; v < g.size(); ++v) {
    for (const Neighbor& nb : g.neighbors(v)) edges.emplace_back(v, nb.id);
  }
  uint64_t total = edges.size();
  if (total == 0) return report;

  std::vector<uint64_t> picks;
  if (sample >= total) {
    picks.resize(total);
    for (uint64_t i = 0; i < total; ++i) picks[i] = i;
  } else {
    picks.reserve(sample);
    for (uint64_t i = 0; i < sample; ++i) picks.push_back(i * total / sample);
  }

  for (uint64_t idx : picks) {
    auto [x, y] = edges[idx];
    ++report.edges_checked;
    if (monotone_reachable_without_edge(g, dataset, x, y)) {
      report.passed = false;
      report.counterexample = CheckCounterexample{
          {x, y},
          distance(dataset.point(x), dataset.point(y)),
          "deleting this edge leaves a monotonic path between its endpoints"};
      return report;
    }
  }
  return report;
}

CheckReport check_angle_separation(const ProximityGraph& g, const Dataset& dataset) {
  check_graph_dataset(g, dataset);
  CheckReport report;
  constexpr double kMinAngle = kPi / 3.0 - 1e-9;

  for (uint32_t v = 0; v < g.size(); ++v) {
    auto edges = g.neighbors(v);
    if (edges.size() < 2) continue;
    std::vector<uint32_t> ids;
    ids.reserve(edges.size());
    for (const Neighbor& nb : edges) ids.push_back(nb.id);
    std::sort(ids.begin(), ids.end());
    auto pv = dataset.point(v);
    for (size_t i = 0; i < ids.size(); ++i) {
      for (size_t j = i + 1; j < ids.size(); ++j) {
        ++report.pairs_checked;
        double angle = angle_at(pv, dataset.point(ids[i]), dataset.point(ids[j]));
        if (angle < kMinAngle) {
          report.passed = false;
          report.counterexample = CheckCounterexample{
              {v, ids[i], ids[j]}, angle, "out-edge pair subtends less than pi/3"};
          return report;
        }
      }
    }
  }
  return report;
}

namespace {

double gaussian(uint64_t seed, uint64_t index) {
  // Box-Muller over two counter draws; offsets keep the log argument positive.
  double u1 = (static_cast<double>(counter_rng(seed, 2 * index) >> 11) + 0.5) * 0x1.0p-53;
  double u2 = static_cast<double>(counter_rng(seed, 2 * index + 1) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace

CheckReport check_reach_threshold_sampling(PointView v, PointView q, PointView u,
                                           uint32_t samples) {
  size_t d = v.size();
  if (q.size() != d || u.size() != d) {
    throw Error(ErrorCode::dimension_mismatch, "points have different dimensions");
  }
  if (d < 2) throw Error(ErrorCode::invalid_argument, "need dimension >= 2");
  double r = distance(v, q);
  if (r == 0.0) throw Error(ErrorCode::invalid_argument, "v and q coincide");
  double dvu = distance(v, u);
  if (dvu == 0.0) throw Error(ErrorCode::invalid_argument, "u and v coincide");

  double theta = angle_at(v, q, u);
  double threshold = r * reach_f(theta);
  bool predicted = dvu < threshold;

  double dvu_sq = dvu * dvu;
  // u inside lune(v, w) with everything squared; w == v rejects naturally.
  auto witness = [&](const std::vector<double>& w) {
    double wv = 0.0, wu = 0.0;
    for (size_t i = 0; i < d; ++i) {
      double dv_i = w[i] - v[i];
      double du_i = w[i] - u[i];
      wv += dv_i * dv_i;
      wu += du_i * du_i;
    }
    return dvu_sq < wv && wu < wv;
  };

  // Orthonormal frame of the (v, q, u) plane, anchored at q.
  std::vector<double> e1(d), e2(d);
  for (size_t i = 0; i < d; ++i) e1[i] = (v[i] - q[i]) / r;
  double proj = 0.0, norm2 = 0.0;
  for (size_t i = 0; i < d; ++i) proj += (u[i] - q[i]) * e1[i];
  for (size_t i = 0; i < d; ++i) {
    e2[i] = (u[i] - q[i]) - proj * e1[i];
    norm2 += e2[i] * e2[i];
  }
  if (norm2 < 1e-20) {
    // collinear triple: any plane through the line serves
    size_t axis = 0;
    for (size_t i = 1; i < d; ++i) {
      if (std::abs(e1[i]) < std::abs(e1[axis])) axis = i;
    }
    std::fill(e2.begin(), e2.end(), 0.0);
    e2[axis] = 1.0;
    proj = e1[axis];
    norm2 = 0.0;
    for (size_t i = 0; i < d; ++i) {
      e2[i] -= proj * e1[i];
      norm2 += e2[i] * e2[i];
    }
  }
  double inv_norm = 1.0 / std::sqrt(norm2);
  for (size_t i = 0; i < d; ++i) e2[i] *= inv_norm;

  bool found = false;
  std::vector<double> w(d);

  uint32_t circle_points = std::max<uint32_t>(2048, samples);
  for (uint32_t i = 0; i < circle_points && !found; ++i) {
    double phi = 2.0 * kPi * i / circle_points;
    double a = r * std::cos(phi), b = r * std::sin(phi);
    for (size_t j = 0; j < d; ++j) w[j] = q[j] + a * e1[j] + b * e2[j];
    found = witness(w);
  }

  constexpr uint64_t kBallSeed = 0x8a7c15f4b9e37796ull;
  std::vector<double> dir(d);
  for (uint32_t i = 0; i < samples && !found; ++i) {
    double norm = 0.0;
    for (size_t j = 0; j < d; ++j) {
      dir[j] = gaussian(kBallSeed, static_cast<uint64_t>(i) * d + j);
      norm += dir[j] * dir[j];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    double radius =
        r * std::pow(uniform_unit(kBallSeed ^ 0x1234567u, i), 1.0 / static_cast<double>(d));
    for (size_t j = 0; j < d; ++j) w[j] = q[j] + radius * dir[j] / norm;
    found = witness(w);
  }

  CheckReport report;
  report.pairs_checked = circle_points + samples;
  if (found != predicted && !(std::abs(dvu - threshold) < 1e-2 * r)) {
    report.passed = false;
    report.counterexample = CheckCounterexample{
        {},
        dvu - threshold,
        found ? "sampling found a witness beyond the predicted threshold"
              : "no witness found although the threshold predicts one"};
  }
  return report;
}

std::string check_report_to_json(const CheckReport& report) {
  nlohmann::json j;
  j["passed"] = report.passed;
  j["pairs_checked"] = report.pairs_checked;
  j["edges_checked"] = report.edges_checked;
  if (report.counterexample) {
    j["counterexample"] = {{"ids", report.counterexample->ids},
                           {"witness", report.counterexample->witness},
                           {"detail", report.counterexample->detail}};
  }
  return j.dump();
}

}  // namespace mrng
