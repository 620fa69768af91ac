#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mrng {

using PointView = std::span<const double>;

/// n points in d-dimensional Euclidean space with dense ids 0..n-1.
/// Coordinates are stored row-major in 64-bit floats; points generated or
/// loaded from 32-bit files are float32-exact so file round trips are
/// lossless. Ingest rejects non-finite coordinates and duplicate points.
class Dataset {
public:
  Dataset(uint32_t dim, std::vector<double> coords);

  uint32_t size() const noexcept { return count_; }
  uint32_t dim() const noexcept { return dim_; }

  PointView point(uint32_t id) const {
    return PointView(coords_.data() + static_cast<size_t>(id) * dim_, dim_);
  }

  std::span<const double> coords() const noexcept { return coords_; }

  /// FNV-1a over (n, d, coordinate bit patterns), all little-endian.
  /// Embedded in graph and conflict files so an index can never be paired
  /// with the wrong points.
  uint64_t checksum() const noexcept { return checksum_; }

private:
  uint32_t count_ = 0;
  uint32_t dim_ = 0;
  std::vector<double> coords_;
  uint64_t checksum_ = 0;
};

// Counter-based PRNG used everywhere randomness is needed. Stream member i
// of stream `seed` is splitmix64's output function applied to
// seed + (i+1) * 0x9e3779b97f4a7c15; identical on every platform.
uint64_t mix64(uint64_t z) noexcept;
uint64_t counter_rng(uint64_t seed, uint64_t index) noexcept;

/// Uniform value in [0,1) that is exactly representable as a float32
/// (top 24 bits of the counter stream).
double uniform_unit(uint64_t seed, uint64_t index) noexcept;

/// n i.i.d. uniform points in the unit hypercube, deterministic in seed.
/// Coordinate (point i, axis j) uses stream index i*d + j.
Dataset generate_uniform_dataset(uint32_t n, uint32_t d, uint64_t seed);

/// Row-major buffer of `count` query points drawn from the same generator.
std::vector<double> generate_uniform_points(uint32_t count, uint32_t d, uint64_t seed);

/// File I/O. save_dataset writes the "vecbin" container: magic "MRNG",
/// version byte 1, u32 n, u32 d, n*d float32 little-endian values.
/// load_dataset reads that container, or falls back to the headerless
/// per-vector layout (u32 dim prefix + float32 payload per vector).
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace mrng
