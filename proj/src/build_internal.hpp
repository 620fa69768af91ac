#pragma once

#include <cstdint>
#include <vector>

#include "mrng/dataset.hpp"
#include "mrng/graph.hpp"

namespace mrng::detail {

// Dense pairwise distance table. Filling evaluates each ordered pair once
// (n(n-1) distance computations, counted in evals), so edge-selection scans
// over the table cost no further evaluations.
class DistanceMatrix {
public:
  DistanceMatrix(const Dataset& dataset, uint32_t threads);

  double operator()(uint32_t i, uint32_t j) const {
    return values_[static_cast<size_t>(i) * n_ + j];
  }
  const double* row(uint32_t i) const { return values_.data() + static_cast<size_t>(i) * n_; }
  uint32_t size() const noexcept { return n_; }
  uint64_t evals() const noexcept { return evals_; }

private:
  uint32_t n_ = 0;
  uint64_t evals_ = 0;
  std::vector<double> values_;
};

// Single-node edge selection over candidates sorted by (distance, id):
// accept y iff delta(x, y) < delta(r, y) for every neighbor r accepted so
// far, stopping at degree_bound neighbors.
std::vector<Neighbor> select_neighbors_full(const DistanceMatrix& matrix, uint32_t x,
                                            uint32_t degree_bound);

ProximityGraph build_full_pool(const Dataset& dataset, const DistanceMatrix& matrix,
                               uint32_t degree_bound, GraphMeta meta, uint32_t threads);

}  // namespace mrng::detail
