#include "mrng/graph.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>

#include "mrng/error.hpp"
#include "mrng/geometry.hpp"

namespace mrng {

ProximityGraph::ProximityGraph(uint32_t n, std::vector<std::vector<Neighbor>> out, GraphMeta meta)
    : n_(n), out_(std::move(out)), meta_(meta) {
  if (out_.size() != n_) {
    throw Error(ErrorCode::invalid_argument, "adjacency size does not match node count");
  }
}

uint64_t ProximityGraph::edge_count() const noexcept {
  uint64_t total = 0;
  for (const auto& list : out_) total += list.size();
  return total;
}

ProximityGraph graph_from_adjacency(const Dataset& dataset,
                                    const std::vector<std::vector<uint32_t>>& out_ids,
                                    GraphMeta meta) {
  uint32_t n = dataset.size();
  if (out_ids.size() != n) {
    throw Error(ErrorCode::invalid_argument, "adjacency size does not match dataset");
  }
  std::vector<std::vector<Neighbor>> out(n);
  for (uint32_t v = 0; v < n; ++v) {
    out[v].reserve(out_ids[v].size());
    for (uint32_t u : out_ids[v]) {
      if (u >= n) throw Error(ErrorCode::invalid_argument, "neighbor id out of range");
      if (u == v) throw Error(ErrorCode::invalid_argument, "self-loop");
      out[v].push_back({u, distance(dataset.point(v), dataset.point(u))});
    }
    std::sort(out[v].begin(), out[v].end(), [](const Neighbor& a, const Neighbor& b) {
      return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
    });
    for (size_t i = 0; i + 1 < out[v].size(); ++i) {
      if (out[v][i].id == out[v][i + 1].id) {
        throw Error(ErrorCode::invalid_argument, "duplicate neighbor");
      }
    }
  }
  meta.dataset_checksum = dataset.checksum();
  return ProximityGraph(n, std::move(out), meta);
}

ProximityGraph without_edge(const ProximityGraph& g, uint32_t from, uint32_t to) {
  std::vector<std::vector<Neighbor>> out(g.size());
  bool found = false;
  for (uint32_t v = 0; v < g.size(); ++v) {
    auto list = g.neighbors(v);
    out[v].reserve(list.size());
    for (const Neighbor& nb : list) {
      if (v == from && nb.id == to) {
        found = true;
        continue;
      }
      out[v].push_back(nb);
    }
  }
  if (!found) throw Error(ErrorCode::invalid_argument, "edge not present");
  return ProximityGraph(g.size(), std::move(out), g.meta());
}

ProximityGraph truncated(const ProximityGraph& g, uint32_t m) {
  if (m == 0) throw Error(ErrorCode::invalid_argument, "degree bound must be >= 1");
  std::vector<std::vector<Neighbor>> out(g.size());
  for (uint32_t v = 0; v < g.size(); ++v) {
    auto list = g.neighbors(v);
    size_t keep = std::min<size_t>(m, list.size());
    out[v].assign(list.begin(), list.begin() + keep);
  }
  GraphMeta meta = g.meta();
  meta.degree_bound = m;
  return ProximityGraph(g.size(), std::move(out), meta);
}

DegreeStats degree_stats(const ProximityGraph& g) {
  DegreeStats stats;
  uint32_t n = g.size();
  if (n == 0) return stats;
  stats.min = std::numeric_limits<uint32_t>::max();
  uint64_t total = 0;
  uint32_t max_deg = 0;
  for (uint32_t v = 0; v < n; ++v) {
    uint32_t deg = g.degree(v);
    stats.min = std::min(stats.min, deg);
    max_deg = std::max(max_deg, deg);
    total += deg;
  }
  stats.max = max_deg;
  stats.mean = static_cast<double>(total) / n;
  stats.histogram.assign(max_deg + 1, 0);
  for (uint32_t v = 0; v < n; ++v) stats.histogram[g.degree(v)]++;
  return stats;
}

ConflictMap::ConflictMap(std::vector<std::vector<std::vector<Neighbor>>> lists,
                         uint64_t dataset_checksum)
    : lists_(std::move(lists)), dataset_checksum_(dataset_checksum) {}

bool ConflictMap::matches(const ProximityGraph& g) const noexcept {
  if (dataset_checksum_ != g.meta().dataset_checksum) return false;
  if (lists_.size() != g.size()) return false;
  for (uint32_t v = 0; v < g.size(); ++v) {
    if (lists_[v].size() != g.degree(v)) return false;
  }
  return true;
}

namespace {

constexpr char kGraphMagic[5] = {'M', 'R', 'N', 'G', 'G'};
constexpr char kConflictMagic[5] = {'M', 'R', 'N', 'G', 'C'};
constexpr uint8_t kFormatVersion = 1;

class Writer {
public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
  }

  void bytes(const char* data, size_t len) { out_.write(data, static_cast<std::streamsize>(len)); }
  void u8(uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>(v >> (8 * i));
    bytes(buf, 4);
  }
  void u64(uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>(v >> (8 * i));
    bytes(buf, 8);
  }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void finish() {
    out_.flush();
    if (!out_) throw Error(ErrorCode::io_error, "write failed: " + path_);
  }

private:
  std::ofstream out_;
  std::string path_;
};

class Reader {
public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::io_error, "cannot open: " + path);
  }

  void bytes(char* data, size_t len) {
    if (!in_.read(data, static_cast<std::streamsize>(len))) {
      throw Error(ErrorCode::format_error, "truncated file");
    }
  }
  uint8_t u8() {
    char c;
    bytes(&c, 1);
    return static_cast<uint8_t>(c);
  }
  uint32_t u32() {
    unsigned char buf[4];
    bytes(reinterpret_cast<char*>(buf), 4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf[i]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    unsigned char buf[8];
    bytes(reinterpret_cast<char*>(buf), 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
    return v;
  }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  void expect_eof() {
    char extra;
    if (in_.read(&extra, 1)) throw Error(ErrorCode::format_error, "trailing bytes after payload");
  }

private:
  std::ifstream in_;
};

}  // namespace

void save_graph(const ProximityGraph& g, const std::string& path) {
  Writer w(path);
  w.bytes(kGraphMagic, 5);
  w.u8(kFormatVersion);
  w.u32(g.size());
  w.u64(g.meta().dataset_checksum);
  w.u32(g.meta().degree_bound);
  w.u8(static_cast<uint8_t>(g.meta().pool));
  w.u32(g.meta().pool_size);
  w.u64(g.meta().seed);
  for (uint32_t v = 0; v < g.size(); ++v) {
    auto list = g.neighbors(v);
    w.u32(static_cast<uint32_t>(list.size()));
    for (const Neighbor& nb : list) {
      w.u32(nb.id);
      w.f64(nb.dist);
    }
  }
  w.finish();
}

ProximityGraph load_graph(const std::string& path) {
  Reader r(path);
  char magic[5];
  r.bytes(magic, 5);
  if (std::memcmp(magic, kGraphMagic, 5) != 0) {
    throw Error(ErrorCode::format_error, "not a graph file");
  }
  if (r.u8() != kFormatVersion) {
    throw Error(ErrorCode::format_error, "unsupported graph format version");
  }
  uint32_t n = r.u32();
  GraphMeta meta;
  meta.dataset_checksum = r.u64();
  meta.degree_bound = r.u32();
  uint8_t pool_tag = r.u8();
  if (pool_tag > static_cast<uint8_t>(PoolKind::knn)) {
    throw Error(ErrorCode::format_error, "unknown pool tag");
  }
  meta.pool = static_cast<PoolKind>(pool_tag);
  meta.pool_size = r.u32();
  meta.seed = r.u64();

  std::vector<std::vector<Neighbor>> out(n);
  for (uint32_t v = 0; v < n; ++v) {
    uint32_t deg = r.u32();
    if (deg >= n && n > 0) throw Error(ErrorCode::format_error, "degree exceeds node count");
    out[v].resize(deg);
    for (uint32_t i = 0; i < deg; ++i) {
      out[v][i].id = r.u32();
      if (out[v][i].id >= n) throw Error(ErrorCode::format_error, "neighbor id out of range");
      out[v][i].dist = r.f64();
    }
  }
  r.expect_eof();
  return ProximityGraph(n, std::move(out), meta);
}

void save_conflicts(const ConflictMap& conflicts, const ProximityGraph& g,
                    const std::string& path) {
  if (!conflicts.matches(g)) {
    throw Error(ErrorCode::checksum_mismatch, "conflict map does not belong to this graph");
  }
  Writer w(path);
  w.bytes(kConflictMagic, 5);
  w.u8(kFormatVersion);
  w.u32(conflicts.size());
  w.u64(conflicts.dataset_checksum());
  for (uint32_t v = 0; v < conflicts.size(); ++v) {
    w.u32(conflicts.edge_lists(v));
    for (uint32_t e = 0; e < conflicts.edge_lists(v); ++e) {
      auto list = conflicts.list(v, e);
      w.u32(static_cast<uint32_t>(list.size()));
      for (const Neighbor& nb : list) {
        w.u32(nb.id);
        w.f64(nb.dist);
      }
    }
  }
  w.finish();
}

ConflictMap load_conflicts(const std::string& path, const ProximityGraph& g) {
  Reader r(path);
  char magic[5];
  r.bytes(magic, 5);
  if (std::memcmp(magic, kConflictMagic, 5) != 0) {
    throw Error(ErrorCode::format_error, "not a conflict file");
  }
  if (r.u8() != kFormatVersion) {
    throw Error(ErrorCode::format_error, "unsupported conflict format version");
  }
  uint32_t n = r.u32();
  uint64_t checksum = r.u64();
  if (n != g.size() || checksum != g.meta().dataset_checksum) {
    throw Error(ErrorCode::checksum_mismatch, "conflict file does not belong to this graph");
  }
  std::vector<std::vector<std::vector<Neighbor>>> lists(n);
  for (uint32_t v = 0; v < n; ++v) {
    uint32_t deg = r.u32();
    if (deg != g.degree(v)) {
      throw Error(ErrorCode::checksum_mismatch, "conflict file edge lists do not match graph");
    }
    lists[v].resize(deg);
    for (uint32_t e = 0; e < deg; ++e) {
      uint32_t len = r.u32();
      if (len > n) throw Error(ErrorCode::format_error, "conflict list longer than dataset");
      lists[v][e].resize(len);
      for (uint32_t i = 0; i < len; ++i) {
        lists[v][e][i].id = r.u32();
        if (lists[v][e][i].id >= n) {
          throw Error(ErrorCode::format_error, "conflict id out of range");
        }
        lists[v][e][i].dist = r.f64();
      }
    }
  }
  r.expect_eof();
  return ConflictMap(std::move(lists), checksum);
}

}  // namespace mrng
