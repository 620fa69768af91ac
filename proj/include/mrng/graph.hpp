#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrng/dataset.hpp"

namespace mrng {

inline constexpr uint32_t kUnboundedDegree = 0xFFFFFFFFu;

struct Neighbor {
  uint32_t id = 0;
  double dist = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

enum class PoolKind : uint8_t {
  full = 0,  // candidate pool is every other point
  knn = 1,   // candidate pool is the l exact nearest neighbors
};

struct GraphMeta {
  uint32_t degree_bound = kUnboundedDegree;
  PoolKind pool = PoolKind::full;
  uint32_t pool_size = 0;  // knn pool size l; 0 when pool == full
  uint64_t seed = 0;       // provenance label recorded by the builder
  uint64_t dataset_checksum = 0;

  friend bool operator==(const GraphMeta&, const GraphMeta&) = default;
};

/// Directed out-adjacency lists over node ids. Each list is sorted by
/// (distance, id) ascending, carries the precomputed node-to-neighbor
/// distance, and contains no self-loops or duplicates. Immutable once built.
class ProximityGraph {
public:
  ProximityGraph() = default;
  ProximityGraph(uint32_t n, std::vector<std::vector<Neighbor>> out, GraphMeta meta);

  uint32_t size() const noexcept { return n_; }
  uint32_t degree(uint32_t v) const { return static_cast<uint32_t>(out_[v].size()); }
  std::span<const Neighbor> neighbors(uint32_t v) const { return out_[v]; }
  const GraphMeta& meta() const noexcept { return meta_; }

  uint64_t edge_count() const noexcept;

  friend bool operator==(const ProximityGraph&, const ProximityGraph&) = default;

private:
  uint32_t n_ = 0;
  std::vector<std::vector<Neighbor>> out_;
  GraphMeta meta_;
};

/// Builds a graph from plain adjacency ids: distances are computed from the
/// dataset, lists sorted by (distance, id), and the dataset checksum stamped
/// into meta. Intended for hand-made graphs in tests and tools.
ProximityGraph graph_from_adjacency(const Dataset& dataset,
                                    const std::vector<std::vector<uint32_t>>& out_ids,
                                    GraphMeta meta = {});

/// Copy of g with the single directed edge from->to removed.
ProximityGraph without_edge(const ProximityGraph& g, uint32_t from, uint32_t to);

/// Copy of g with every adjacency list truncated to its first
/// min(m, degree) entries; meta.degree_bound is set to m.
ProximityGraph truncated(const ProximityGraph& g, uint32_t m);

struct DegreeStats {
  uint32_t min = 0;
  uint32_t max = 0;
  double mean = 0.0;
  std::vector<uint64_t> histogram;  // histogram[k] = number of nodes with out-degree k
};

DegreeStats degree_stats(const ProximityGraph& g);

/// For each directed edge v->u, the conflicting nodes of that edge: every w
/// whose lune with v strictly contains u, stored with delta(v, w) and sorted
/// by (distance, id). Lists are aligned with the graph's adjacency order.
class ConflictMap {
public:
  ConflictMap() = default;
  ConflictMap(std::vector<std::vector<std::vector<Neighbor>>> lists, uint64_t dataset_checksum);

  uint32_t size() const noexcept { return static_cast<uint32_t>(lists_.size()); }
  uint64_t dataset_checksum() const noexcept { return dataset_checksum_; }

  std::span<const Neighbor> list(uint32_t v, uint32_t edge_index) const {
    return lists_[v][edge_index];
  }
  uint32_t edge_lists(uint32_t v) const { return static_cast<uint32_t>(lists_[v].size()); }

  bool matches(const ProximityGraph& g) const noexcept;

  friend bool operator==(const ConflictMap&, const ConflictMap&) = default;

private:
  std::vector<std::vector<std::vector<Neighbor>>> lists_;
  uint64_t dataset_checksum_ = 0;
};

// Binary container formats, all little-endian.
//
// Graph:    "MRNGG" v1 | u32 n | u64 dataset checksum | u32 degree bound
//           (0xFFFFFFFF = unbounded) | u8 pool tag | u32 pool size | u64 seed
//           | per node: u32 out-degree, then (u32 id, f64 distance) pairs.
// Conflict: "MRNGC" v1 | u32 n | u64 dataset checksum | per node: u32
//           out-degree, then per out-edge: u32 length, (u32 id, f64
//           distance) pairs.
//
// Loading a truncated or version-mismatched file fails without producing a
// partial object; round trips are bit-exact.
void save_graph(const ProximityGraph& g, const std::string& path);
ProximityGraph load_graph(const std::string& path);
void save_conflicts(const ConflictMap& conflicts, const ProximityGraph& g, const std::string& path);
ConflictMap load_conflicts(const std::string& path, const ProximityGraph& g);

}  // namespace mrng
