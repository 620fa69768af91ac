#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mrng/build.hpp"
#include "mrng/error.hpp"
#include "mrng/geometry.hpp"
#include "mrng/search.hpp"
#include "mrng/verify.hpp"
#include "test_util.hpp"

using namespace mrng;

namespace {
constexpr double kPi = std::numbers::pi;

Dataset collinear3() { return Dataset(2, {0.0, 0.0, 1.0, 0.0, 2.0, 0.0}); }
}  // namespace

TEST_CASE("brute force knn") {
  Dataset s = collinear3();
  auto hits = brute_force_knn(s, s.point(1), 1);
  CHECK(hits.front().id == 1);
  CHECK(hits.front().dist == 0.0);

  std::vector<double> q = {0.9, 0.0};
  auto two = brute_force_knn(s, q, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].id == 1);
  CHECK(two[0].dist == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(two[1].id == 0);
  CHECK(two[1].dist == doctest::Approx(0.9).epsilon(1e-12));

  auto all = brute_force_knn(s, q, 3);
  CHECK(all.size() == 3);
  CHECK(all[2].id == 2);

  CHECK_THROWS_AS(brute_force_knn(s, q, 0), Error);
  CHECK_THROWS_AS(brute_force_knn(s, q, 4), Error);
}

TEST_CASE("brute force knn agrees with a reversed linear scan") {
  Dataset s = generate_uniform_dataset(300, 7, 55);
  for (uint32_t i = 0; i < 50; ++i) {
    std::vector<double> q = generate_uniform_points(1, 7, 800 + i);
    auto hit = brute_force_knn(s, q, 1).front();

    uint32_t best = s.size() - 1;
    double best_dist = distance(s.point(best), q);
    for (int32_t j = static_cast<int32_t>(s.size()) - 2; j >= 0; --j) {
      double dj = distance(s.point(j), q);
      if (dj < best_dist || (dj == best_dist && static_cast<uint32_t>(j) < best)) {
        best = static_cast<uint32_t>(j);
        best_dist = dj;
      }
    }
    CHECK(hit.id == best);
    CHECK(hit.dist == best_dist);
  }
}

TEST_CASE("is_monotonic on the exact graph and on a broken graph") {
  Dataset s = generate_uniform_dataset(100, 2, 12);
  ProximityGraph g = build_mrng(s);
  CheckReport good = is_monotonic(g, s);
  CHECK(good.passed);
  CHECK(good.pairs_checked == 100ull * 100ull);

  Dataset chain = collinear3();
  ProximityGraph chain_graph = build_mrng(chain);
  ProximityGraph cut = without_edge(chain_graph, 1, 2);
  CheckReport bad = is_monotonic(cut, chain);
  REQUIRE_FALSE(bad.passed);
  REQUIRE(bad.counterexample.has_value());
  CHECK(bad.counterexample->ids == std::vector<uint32_t>{0, 2});

  // the counterexample re-verifies: greedy from 0 cannot reach 2
  SearchResult walk = closer_and_go(cut, chain, 0, chain.point(2));
  CHECK(walk.path.back() != 2);
}

TEST_CASE("complete digraph is monotonic") {
  Dataset s = generate_uniform_dataset(8, 3, 77);
  std::vector<std::vector<uint32_t>> adjacency(8);
  for (uint32_t v = 0; v < 8; ++v) {
    for (uint32_t u = 0; u < 8; ++u) {
      if (u != v) adjacency[v].push_back(u);
    }
  }
  ProximityGraph g = graph_from_adjacency(s, adjacency);
  CHECK(is_monotonic(g, s).passed);
}

TEST_CASE("definition check accepts builds and pinpoints single-edge edits") {
  Dataset s = generate_uniform_dataset(80, 4, 33);
  ProximityGraph g = build_mrng(s);
  CHECK(check_mrng_definition(g, s).passed);

  // remove one edge: the pair must fail in the "edge absent" direction
  uint32_t x = 5;
  REQUIRE(g.degree(x) > 0);
  uint32_t y = g.neighbors(x)[0].id;
  CheckReport removed = check_mrng_definition(without_edge(g, x, y), s);
  REQUIRE_FALSE(removed.passed);

  // add an edge to a node that the nearest neighbor's lune blocks
  auto ids = testutil::adjacency_ids(g);
  uint32_t target = 0;
  bool found = false;
  std::vector<std::vector<uint32_t>> extended = ids;
  for (uint32_t cand = 0; cand < s.size() && !found; ++cand) {
    if (cand == x) continue;
    if (std::find(ids[x].begin(), ids[x].end(), cand) != ids[x].end()) continue;
    for (uint32_t nb : ids[x]) {
      if (in_lune(s.point(x), s.point(cand), s.point(nb))) {
        extended[x].push_back(cand);
        target = cand;
        found = true;
        break;
      }
    }
  }
  REQUIRE(found);
  (void)target;
  CheckReport added = check_mrng_definition(graph_from_adjacency(s, extended), s);
  REQUIRE_FALSE(added.passed);
  REQUIRE(added.counterexample.has_value());
  CHECK(added.counterexample->ids[0] == x);  // the edited node is the offender
}

TEST_CASE("edge minimality") {
  Dataset s = generate_uniform_dataset(60, 3, 21);
  ProximityGraph g = build_mrng(s);
  CheckReport all = check_edge_minimality(g, s);
  CHECK(all.passed);
  CHECK(all.edges_checked == g.edge_count());

  CheckReport sampled = check_edge_minimality(g, s, 10);
  CHECK(sampled.passed);
  CHECK(sampled.edges_checked == 10);

  // a long redundant edge is not necessary for monotonicity
  auto ids = testutil::adjacency_ids(g);
  auto far = brute_force_knn(s, s.point(0), s.size()).back();
  REQUIRE(std::find(ids[0].begin(), ids[0].end(), far.id) == ids[0].end());
  ids[0].push_back(far.id);
  ProximityGraph padded = graph_from_adjacency(s, ids);
  CHECK(is_monotonic(without_edge(padded, 0, far.id), s).passed);
  CHECK_FALSE(check_edge_minimality(padded, s).passed);
}

TEST_CASE("edge minimality on the two-point graph") {
  Dataset s(2, {0.0, 0.0, 1.0, 0.0});
  ProximityGraph g = build_mrng(s);
  CHECK(check_edge_minimality(g, s).passed);
}

TEST_CASE("angle separation") {
  Dataset s = generate_uniform_dataset(150, 5, 66);
  ProximityGraph g = build_mrng(s);
  CHECK(check_angle_separation(g, s).passed);

  // hand-built star with a 45 degree pair
  Dataset star(2, {0.0, 0.0, 1.0, 0.0, 1.0, 1.0});
  ProximityGraph bad = graph_from_adjacency(star, {{1, 2}, {}, {}});
  CheckReport report = check_angle_separation(bad, star);
  REQUIRE_FALSE(report.passed);
  CHECK(report.counterexample->ids == std::vector<uint32_t>{0, 1, 2});
  CHECK(report.counterexample->witness == doctest::Approx(kPi / 4).epsilon(1e-12));

  ProximityGraph single = graph_from_adjacency(star, {{1}, {}, {}});
  CHECK(check_angle_separation(single, star).passed);
}

TEST_CASE("reach threshold sampling check") {
  // far collinear candidate: threshold 2 with room to spare on both sides
  std::vector<double> v = {0.0, 0.0}, q = {1.0, 0.0};
  std::vector<double> u_inside = {1.9, 0.0};   // |vu| = 1.9 < 2 = f(0)
  std::vector<double> u_outside = {2.5, 0.0};  // |vu| = 2.5 >= 2
  CHECK(check_reach_threshold_sampling(v, q, u_inside, 512).passed);
  CHECK(check_reach_threshold_sampling(v, q, u_outside, 512).passed);

  // opposite ray: f(pi) = 0, no witness can exist
  std::vector<double> u_behind = {-1.5, 0.0};
  CHECK(check_reach_threshold_sampling(v, q, u_behind, 512).passed);

  CHECK_THROWS_AS(check_reach_threshold_sampling(v, v, u_inside, 16), Error);
  CHECK_THROWS_AS(check_reach_threshold_sampling(v, q, v, 16), Error);

  // random admissible triples
  uint32_t failures = 0;
  uint32_t trials = 0;
  for (uint32_t d : {2u, 3u}) {
    for (uint32_t i = 0; trials < 400 && i < 4000; ++i) {
      std::vector<double> vv = generate_uniform_points(1, d, 50000 + i * 3);
      std::vector<double> qq = generate_uniform_points(1, d, 50001 + i * 3);
      std::vector<double> uu = generate_uniform_points(1, d, 50002 + i * 3);
      double r = distance(vv, qq);
      if (r == 0.0 || distance(uu, qq) < r || distance(vv, uu) == 0.0) continue;
      ++trials;
      if (!check_reach_threshold_sampling(vv, qq, uu, 256).passed) ++failures;
    }
  }
  REQUIRE(trials >= 300);
  CHECK(failures == 0);
}

TEST_CASE("checksum guard on checkers") {
  Dataset s = generate_uniform_dataset(30, 3, 1);
  Dataset other = generate_uniform_dataset(30, 3, 2);
  ProximityGraph g = build_mrng(s);
  CHECK_THROWS_AS(is_monotonic(g, other), Error);
  CHECK_THROWS_AS(check_mrng_definition(g, other), Error);
  CHECK_THROWS_AS(check_edge_minimality(g, other), Error);
  CHECK_THROWS_AS(check_angle_separation(g, other), Error);
}
