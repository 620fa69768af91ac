#include <doctest.h>

#include <algorithm>
#include <vector>

#include "mrng/build.hpp"
#include "mrng/error.hpp"
#include "mrng/geometry.hpp"
#include "mrng/search.hpp"
#include "mrng/verify.hpp"
#include "test_util.hpp"

using namespace mrng;

namespace {

Dataset collinear3() { return Dataset(2, {0.0, 0.0, 1.0, 0.0, 2.0, 0.0}); }

bool has_escape(const SearchResult& result) {
  return std::any_of(result.trace.begin(), result.trace.end(),
                     [](const TraceEvent& ev) { return ev.action == TraceAction::escape; });
}

}  // namespace

TEST_CASE("closer_and_go walks the collinear chain") {
  Dataset s = collinear3();
  ProximityGraph g = build_mrng(s);
  SearchResult res = closer_and_go(g, s, 0, s.point(2));
  CHECK(res.path == std::vector<uint32_t>{0, 1, 2});
  CHECK(res.terminated_at_local_min);
  CHECK(res.candidates.front().id == 2);
  CHECK(res.candidates.front().dist == 0.0);
}

TEST_CASE("closer_and_go stops immediately at the nearest neighbor") {
  Dataset s = generate_uniform_dataset(50, 3, 3);
  ProximityGraph g = build_mrng(s);
  std::vector<double> q(s.point(17).begin(), s.point(17).end());
  q[0] += 1e-4;  // nudge so the start is the unique nearest node
  uint32_t start = brute_force_knn(s, q, 1).front().id;
  SearchResult res = closer_and_go(g, s, start, q);
  CHECK(res.path == std::vector<uint32_t>{start});
  CHECK(res.terminated_at_local_min);
}

TEST_CASE("greedy walk reaches every dataset target on the exact graph") {
  Dataset s = generate_uniform_dataset(60, 2, 8);
  ProximityGraph g = build_mrng(s);
  REQUIRE(is_monotonic(g, s).passed);
  for (uint32_t p = 0; p < s.size(); ++p) {
    for (uint32_t q = 0; q < s.size(); ++q) {
      SearchResult res = closer_and_go(g, s, p, s.point(q));
      CHECK(res.path.back() == q);
      for (size_t i = 0; i + 1 < res.path.size(); ++i) {
        CHECK(distance(s.point(res.path[i + 1]), s.point(q)) <
              distance(s.point(res.path[i]), s.point(q)));
      }
    }
  }
}

TEST_CASE("best_first with full budget finds the true nearest neighbor") {
  Dataset s = generate_uniform_dataset(200, 4, 15);
  ProximityGraph g = build_mrng(s);
  uint32_t entry = pick_entry(s);
  for (uint32_t i = 0; i < 50; ++i) {
    std::vector<double> q = generate_uniform_points(1, 4, 1000 + i);
    SearchResult res = best_first(g, s, entry, q, s.size(), 1);
    CHECK(res.candidates.front().id == brute_force_knn(s, q, 1).front().id);
  }
}

TEST_CASE("best_first budget accounting is exact") {
  Dataset s = generate_uniform_dataset(300, 5, 41);
  ProximityGraph g = build_mrng(s);
  uint32_t entry = pick_entry(s);
  std::vector<double> q = generate_uniform_points(1, 5, 99);

  SearchResult single = best_first(g, s, entry, q, 1, 3);
  CHECK(single.distance_evals == 1);
  CHECK(single.candidates.size() == 1);
  CHECK(single.candidates.front().id == entry);

  for (uint64_t budget : {2ull, 7ull, 50ull, 299ull, 300ull, 5000ull}) {
    SearchResult res = best_first(g, s, entry, q, budget, 5);
    CHECK(res.distance_evals <= budget);
    // the exact graph is strongly connected, so the whole budget is usable
    CHECK(res.distance_evals == std::min<uint64_t>(budget, s.size()));
    for (size_t i = 0; i + 1 < res.candidates.size(); ++i) {
      bool ordered = res.candidates[i].dist < res.candidates[i + 1].dist ||
                     (res.candidates[i].dist == res.candidates[i + 1].dist &&
                      res.candidates[i].id < res.candidates[i + 1].id);
      CHECK(ordered);
    }
  }
}

TEST_CASE("best_first is deterministic including the trace") {
  Dataset s = generate_uniform_dataset(150, 6, 77);
  ProximityGraph g = build_mrng(s);
  std::vector<double> q = generate_uniform_points(1, 6, 7);
  SearchResult a = best_first(g, s, pick_entry(s), q, 60, 4);
  SearchResult b = best_first(g, s, pick_entry(s), q, 60, 4);
  CHECK(a.candidates == b.candidates);
  CHECK(a.path == b.path);
  CHECK(a.distance_evals == b.distance_evals);
  CHECK(trace_to_json_lines(a) == trace_to_json_lines(b));
}

TEST_CASE("search input validation") {
  Dataset s = generate_uniform_dataset(20, 3, 5);
  ProximityGraph g = build_mrng(s);
  std::vector<double> q = generate_uniform_points(1, 3, 1);
  CHECK_THROWS_AS(best_first(g, s, 99, q, 10, 1), Error);
  CHECK_THROWS_AS(best_first(g, s, 0, q, 0, 1), Error);
  CHECK_THROWS_AS(best_first(g, s, 0, q, 10, 0), Error);
  std::vector<double> bad_q = {0.1, 0.2};
  CHECK_THROWS_AS(best_first(g, s, 0, bad_q, 10, 1), Error);

  Dataset other = generate_uniform_dataset(20, 3, 6);
  CHECK_THROWS_AS(best_first(g, other, 0, q, 10, 1), Error);  // checksum mismatch
}

TEST_CASE("conflict_search on the wedge returns the dropped node") {
  testutil::WedgeCase wedge;
  Dataset& s = wedge.dataset;
  ProximityGraph g = build_mrng(s);
  ConflictMap conflicts = compute_conflicts(s, g);

  // v is a local minimum: its only neighbor u is farther from the query
  double r = distance(s.point(wedge.v), wedge.query);
  CHECK(r == doctest::Approx(1.86815).epsilon(1e-5));
  CHECK(distance(s.point(wedge.u), wedge.query) > r);

  uint32_t found = conflict_search(s, g, conflicts, wedge.v, wedge.query);
  CHECK(found == wedge.w);
  CHECK(found == brute_force_knn(s, wedge.query, 1).front().id);
}

TEST_CASE("conflict_search returns v when v is the true nearest neighbor") {
  Dataset s = generate_uniform_dataset(120, 2, 19);
  ProximityGraph g = build_mrng(s);
  ConflictMap conflicts = compute_conflicts(s, g);
  for (uint32_t i = 0; i < 40; ++i) {
    std::vector<double> q = generate_uniform_points(1, 2, 500 + i);
    SearchResult walk = closer_and_go(g, s, pick_entry(s), q);
    uint32_t v = walk.path.back();
    if (v != brute_force_knn(s, q, 1).front().id) continue;
    CHECK(conflict_search(s, g, conflicts, v, q) == v);
  }
}

TEST_CASE("greedy walk plus conflict_search equals brute force") {
  for (uint32_t d : {2u, 10u}) {
    Dataset s = generate_uniform_dataset(200, d, 4242 + d);
    ProximityGraph g = build_mrng(s);
    ConflictMap conflicts = compute_conflicts(s, g);
    uint32_t entry = pick_entry(s);
    for (uint32_t i = 0; i < 300; ++i) {
      std::vector<double> q = generate_uniform_points(1, d, 9000 + i);
      SearchResult walk = closer_and_go(g, s, entry, q);
      uint32_t found = conflict_search(s, g, conflicts, walk.path.back(), q);
      CHECK(found == brute_force_knn(s, q, 1).front().id);
    }
  }
}

TEST_CASE("conflict_search error paths") {
  testutil::WedgeCase wedge;
  Dataset& s = wedge.dataset;
  ProximityGraph g = build_mrng(s);
  ConflictMap conflicts = compute_conflicts(s, g);

  // u has an improving neighbor for this query, so it is not a local minimum
  CHECK_THROWS_AS(conflict_search(s, g, conflicts, wedge.u, wedge.query), Error);

  ProximityGraph cut = without_edge(g, wedge.u, wedge.w);
  CHECK_THROWS_AS(conflict_search(s, cut, conflicts, wedge.v, wedge.query), Error);

  // query on the node itself degenerates to the node
  std::vector<double> at_v(s.point(wedge.v).begin(), s.point(wedge.v).end());
  CHECK(conflict_search(s, g, conflicts, wedge.v, at_v) == wedge.v);
}

TEST_CASE("escape rescues a dead end that stalls best_first") {
  testutil::WedgeCase wedge;
  Dataset& s = wedge.dataset;
  ProximityGraph cut = without_edge(build_mrng(s), wedge.u, wedge.w);
  ConflictMap conflicts = compute_conflicts(s, cut);

  SearchResult plain = best_first(cut, s, wedge.v, wedge.query, 100, 1);
  CHECK(plain.candidates.front().id == wedge.v);  // stalled at the local minimum

  SearchResult rescued = search_with_escape(cut, s, conflicts, wedge.v, wedge.query, 100, 1);
  CHECK(rescued.candidates.front().id == wedge.w);
  CHECK(rescued.candidates.front().dist < plain.candidates.front().dist);
  CHECK(has_escape(rescued));
  CHECK(rescued.candidates.front().id == brute_force_knn(s, wedge.query, 1).front().id);
}

TEST_CASE("escape search with unlimited budget matches brute force") {
  Dataset s = generate_uniform_dataset(200, 10, 321);
  ProximityGraph g = build_mrng(s);
  ConflictMap conflicts = compute_conflicts(s, g);
  uint32_t entry = pick_entry(s);
  for (uint32_t i = 0; i < 100; ++i) {
    std::vector<double> q = generate_uniform_points(1, 10, 31000 + i);
    SearchResult escape = search_with_escape(g, s, conflicts, entry, q, s.size() * 2, 1);
    SearchResult plain = best_first(g, s, entry, q, s.size() * 2, 1);
    CHECK(escape.candidates.front().id == brute_force_knn(s, q, 1).front().id);
    CHECK(escape.candidates.front().dist <= plain.candidates.front().dist);
  }
}

TEST_CASE("escape with budget 1 degenerates to the entry") {
  Dataset s = generate_uniform_dataset(50, 4, 9);
  ProximityGraph g = build_mrng(s);
  ConflictMap conflicts = compute_conflicts(s, g);
  std::vector<double> q = generate_uniform_points(1, 4, 5);
  SearchResult res = search_with_escape(g, s, conflicts, 3, q, 1, 1);
  CHECK(res.distance_evals == 1);
  CHECK(res.candidates.size() == 1);
  CHECK(res.candidates.front().id == 3);
}

TEST_CASE("pick_entry") {
  CHECK(pick_entry(collinear3()) == 1);

  Dataset pair(2, {0.0, 0.0, 1.0, 0.0});
  CHECK(pick_entry(pair) == 0);  // symmetric, lower id wins

  Dataset s = generate_uniform_dataset(5000, 10, 2024);
  uint32_t entry = pick_entry(s);
  std::vector<double> centroid(10, 0.0);
  for (uint32_t i = 0; i < s.size(); ++i) {
    for (uint32_t j = 0; j < 10; ++j) centroid[j] += s.point(i)[j];
  }
  for (double& c : centroid) c /= s.size();
  uint32_t oracle = 0;
  double best = distance(s.point(0), centroid);
  for (uint32_t i = 1; i < s.size(); ++i) {
    double dist_i = distance(s.point(i), centroid);
    if (dist_i < best) {
      best = dist_i;
      oracle = i;
    }
  }
  CHECK(entry == oracle);
  CHECK(best < 0.5);
}
