#include "mrng/build.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>

#include "build_internal.hpp"
#include "mrng/error.hpp"
#include "mrng/geometry.hpp"
#include "parallel.hpp"

namespace mrng {

namespace detail {

DistanceMatrix::DistanceMatrix(const Dataset& dataset, uint32_t threads) {
  n_ = dataset.size();
  values_.assign(static_cast<size_t>(n_) * n_, 0.0);
  parallel_for(n_, threads, [&](uint64_t i) {
    auto a = dataset.point(static_cast<uint32_t>(i));
    double* row = values_.data() + i * n_;
    for (uint32_t j = 0; j < n_; ++j) {
      if (j == i) continue;
      row[j] = distance(a, dataset.point(j));
    }
  });
  evals_ = static_cast<uint64_t>(n_) * (n_ - 1);
}

std::vector<Neighbor> select_neighbors_full(const DistanceMatrix& matrix, uint32_t x,
                                            uint32_t degree_bound) {
  uint32_t n = matrix.size();
  const double* row = matrix.row(x);

  std::vector<uint32_t> order;
  order.reserve(n - 1);
  for (uint32_t y = 0; y < n; ++y) {
    if (y != x) order.push_back(y);
  }
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return row[a] != row[b] ? row[a] < row[b] : a < b;
  });

  std::vector<Neighbor> accepted;
  for (uint32_t y : order) {
    bool blocked = false;
    for (const Neighbor& r : accepted) {
      if (!(row[y] < matrix(r.id, y))) {
        blocked = true;
        break;
      }
    }
    if (!blocked) {
      accepted.push_back({y, row[y]});
      if (accepted.size() >= degree_bound) break;
    }
  }
  return accepted;
}

ProximityGraph build_full_pool(const Dataset& dataset, const DistanceMatrix& matrix,
                               uint32_t degree_bound, GraphMeta meta, uint32_t threads) {
  uint32_t n = dataset.size();
  std::vector<std::vector<Neighbor>> out(n);
  parallel_for(n, threads, [&](uint64_t x) {
    out[x] = select_neighbors_full(matrix, static_cast<uint32_t>(x), degree_bound);
  });
  meta.dataset_checksum = dataset.checksum();
  return ProximityGraph(n, std::move(out), meta);
}

}  // namespace detail

ProximityGraph build_mrng(const Dataset& dataset, uint32_t threads, BuildStats* stats) {
  if (dataset.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "need at least two points");
  }
  auto start = std::chrono::steady_clock::now();
  detail::DistanceMatrix matrix(dataset, threads);
  GraphMeta meta;
  meta.degree_bound = kUnboundedDegree;
  meta.pool = PoolKind::full;
  ProximityGraph g = detail::build_full_pool(dataset, matrix, kUnboundedDegree, meta, threads);
  if (stats) {
    stats->distance_evals = matrix.evals();
    stats->pool_distance_evals = 0;
    stats->wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  }
  return g;
}

ProximityGraph build_generalized(const Dataset& dataset, const BuildParams& params,
                                 const std::vector<std::vector<uint32_t>>& pools,
                                 BuildStats* stats) {
  uint32_t n = dataset.size();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "need at least two points");
  if (params.degree_bound == 0) {
    throw Error(ErrorCode::invalid_argument, "degree bound must be >= 1");
  }
  if (pools.size() != n) {
    throw Error(ErrorCode::invalid_argument, "pool count does not match dataset");
  }
  for (uint32_t x = 0; x < n; ++x) {
    for (uint32_t y : pools[x]) {
      if (y >= n) throw Error(ErrorCode::invalid_argument, "pool id out of range");
      if (y == x) throw Error(ErrorCode::invalid_argument, "pool contains the node itself");
    }
  }

  auto start = std::chrono::steady_clock::now();
  std::atomic<uint64_t> evals{0};
  std::vector<std::vector<Neighbor>> out(n);

  detail::parallel_for(n, params.threads, [&](uint64_t xi) {
    auto x = static_cast<uint32_t>(xi);
    auto px = dataset.point(x);
    uint64_t local_evals = 0;

    std::vector<Neighbor> candidates;
    candidates.reserve(pools[x].size());
    for (uint32_t y : pools[x]) {
      candidates.push_back({y, distance(px, dataset.point(y))});
      ++local_evals;
    }
    std::sort(candidates.begin(), candidates.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
    });

    std::vector<Neighbor>& accepted = out[x];
    for (const Neighbor& cand : candidates) {
      if (accepted.size() >= params.degree_bound) break;
      auto py = dataset.point(cand.id);
      bool blocked = false;
      for (const Neighbor& r : accepted) {
        double r_to_y = distance(dataset.point(r.id), py);
        ++local_evals;
        if (!(cand.dist < r_to_y)) {
          blocked = true;
          break;
        }
      }
      if (!blocked) accepted.push_back(cand);
    }
    evals.fetch_add(local_evals, std::memory_order_relaxed);
  });

  if (stats) {
    stats->distance_evals = evals.load();
    stats->pool_distance_evals = 0;
    stats->wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  }

  GraphMeta meta;
  meta.degree_bound = params.degree_bound;
  meta.pool = params.pool;
  meta.pool_size = params.pool_size;
  meta.seed = params.seed;
  meta.dataset_checksum = dataset.checksum();
  return ProximityGraph(n, std::move(out), meta);
}

KnnPoolsResult knn_pools(const Dataset& dataset, uint32_t l) {
  uint32_t n = dataset.size();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "need at least two points");
  if (l < 1 || l > n - 1) {
    throw Error(ErrorCode::invalid_argument, "knn pool size must be in [1, n-1]");
  }
  KnnPoolsResult result;
  result.pools.resize(n);
  std::atomic<uint64_t> evals{0};
  detail::parallel_for(n, 0, [&](uint64_t xi) {
    auto x = static_cast<uint32_t>(xi);
    auto px = dataset.point(x);
    std::vector<Neighbor> all;
    all.reserve(n - 1);
    for (uint32_t y = 0; y < n; ++y) {
      if (y != x) all.push_back({y, distance(px, dataset.point(y))});
    }
    std::partial_sort(all.begin(), all.begin() + l, all.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                        return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
                      });
    result.pools[x].reserve(l);
    for (uint32_t i = 0; i < l; ++i) result.pools[x].push_back(all[i].id);
    evals.fetch_add(n - 1, std::memory_order_relaxed);
  });
  result.distance_evals = evals.load();
  return result;
}

BuildOutput build(const Dataset& dataset, const BuildParams& params) {
  if (dataset.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "need at least two points");
  }
  if (params.degree_bound == 0) {
    throw Error(ErrorCode::invalid_argument, "degree bound must be >= 1");
  }

  BuildOutput output;
  auto start = std::chrono::steady_clock::now();

  if (params.pool == PoolKind::full) {
    detail::DistanceMatrix matrix(dataset, params.threads);
    GraphMeta meta;
    meta.degree_bound = params.degree_bound;
    meta.pool = PoolKind::full;
    meta.pool_size = 0;
    meta.seed = params.seed;
    output.graph =
        detail::build_full_pool(dataset, matrix, params.degree_bound, meta, params.threads);
    output.stats.distance_evals = matrix.evals();
  } else {
    if (params.pool_size == 0) {
      throw Error(ErrorCode::invalid_argument, "knn pool requires a pool size");
    }
    KnnPoolsResult pools = knn_pools(dataset, params.pool_size);
    BuildStats inner;
    output.graph = build_generalized(dataset, params, pools.pools, &inner);
    output.stats.distance_evals = inner.distance_evals;
    output.stats.pool_distance_evals = pools.distance_evals;
  }

  if (params.record_conflicts) {
    output.conflicts = compute_conflicts(dataset, output.graph, params.threads);
  }
  output.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return output;
}

ConflictMap compute_conflicts(const Dataset& dataset, const ProximityGraph& g, uint32_t threads) {
  if (g.meta().dataset_checksum != dataset.checksum()) {
    throw Error(ErrorCode::checksum_mismatch, "graph was not built over this dataset");
  }
  uint32_t n = dataset.size();
  detail::DistanceMatrix matrix(dataset, threads);

  std::vector<std::vector<std::vector<Neighbor>>> lists(n);
  detail::parallel_for(n, threads, [&](uint64_t vi) {
    auto v = static_cast<uint32_t>(vi);
    auto edges = g.neighbors(v);
    lists[v].resize(edges.size());
    const double* v_row = matrix.row(v);
    for (size_t e = 0; e < edges.size(); ++e) {
      uint32_t u = edges[e].id;
      double v_to_u = v_row[u];
      const double* u_row = matrix.row(u);
      auto& list = lists[v][e];
      for (uint32_t w = 0; w < n; ++w) {
        // u inside lune(v, w): strictly closer to both v and w than |vw|
        if (v_to_u < v_row[w] && u_row[w] < v_row[w]) {
          list.push_back({w, v_row[w]});
        }
      }
      std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
      });
    }
  });
  return ConflictMap(std::move(lists), dataset.checksum());
}

}  // namespace mrng
