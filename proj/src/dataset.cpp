#include "mrng/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "mrng/error.hpp"

namespace mrng {

namespace {

constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ull;

uint64_t fnv1a(uint64_t hash, const void* data, size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

uint64_t hash_u32(uint64_t hash, uint32_t value) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(value >> (8 * i));
  return fnv1a(hash, buf, 4);
}

uint64_t hash_f64(uint64_t hash, double value) {
  uint64_t bits;
  std::memcpy(&bits, &value, 8);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  return fnv1a(hash, buf, 8);
}

uint64_t dataset_checksum(uint32_t n, uint32_t d, const std::vector<double>& coords) {
  uint64_t hash = 0xcbf29ce484222325ull;
  hash = hash_u32(hash, n);
  hash = hash_u32(hash, d);
  for (double c : coords) hash = hash_f64(hash, c);
  return hash;
}

void check_duplicates(uint32_t n, uint32_t d, const std::vector<double>& coords) {
  if (n < 2) return;
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  auto row = [&](uint32_t id) { return coords.data() + static_cast<size_t>(id) * d; };
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return std::lexicographical_compare(row(a), row(a) + d, row(b), row(b) + d);
  });
  for (uint32_t i = 0; i + 1 < n; ++i) {
    if (std::equal(row(order[i]), row(order[i]) + d, row(order[i + 1]))) {
      throw Error(ErrorCode::duplicate_points,
                  "duplicate points at ids " + std::to_string(std::min(order[i], order[i + 1])) +
                      " and " + std::to_string(std::max(order[i], order[i + 1])));
    }
  }
}

}  // namespace

Dataset::Dataset(uint32_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw Error(ErrorCode::invalid_argument, "dimension must be >= 1");
  if (coords_.size() % dim_ != 0) {
    throw Error(ErrorCode::invalid_argument, "coordinate count not a multiple of the dimension");
  }
  count_ = static_cast<uint32_t>(coords_.size() / dim_);
  for (double c : coords_) {
    if (!std::isfinite(c)) {
      throw Error(ErrorCode::invalid_argument, "coordinates must be finite");
    }
  }
  check_duplicates(count_, dim_, coords_);
  checksum_ = dataset_checksum(count_, dim_, coords_);
}

uint64_t mix64(uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t counter_rng(uint64_t seed, uint64_t index) noexcept {
  return mix64(seed + (index + 1) * kGamma);
}

double uniform_unit(uint64_t seed, uint64_t index) noexcept {
  uint32_t top = static_cast<uint32_t>(counter_rng(seed, index) >> 40);  // 24 bits
  return static_cast<double>(static_cast<float>(top) * 0x1.0p-24f);
}

Dataset generate_uniform_dataset(uint32_t n, uint32_t d, uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "n must be >= 1");
  return Dataset(d, generate_uniform_points(n, d, seed));
}

std::vector<double> generate_uniform_points(uint32_t count, uint32_t d, uint64_t seed) {
  if (d == 0) throw Error(ErrorCode::invalid_argument, "dimension must be >= 1");
  std::vector<double> coords(static_cast<size_t>(count) * d);
  for (size_t i = 0; i < coords.size(); ++i) coords[i] = uniform_unit(seed, i);
  return coords;
}

namespace {

constexpr char kVecbinMagic[4] = {'M', 'R', 'N', 'G'};
constexpr uint8_t kVecbinVersion = 1;

void write_u32(std::ostream& out, uint32_t value) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>(value >> (8 * i));
  out.write(buf, 4);
}

bool read_u32(std::istream& in, uint32_t& value) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) return false;
  value = 0;
  for (int i = 0; i < 4; ++i) value |= static_cast<uint32_t>(buf[i]) << (8 * i);
  return true;
}

void write_f32(std::ostream& out, float value) {
  uint32_t bits;
  std::memcpy(&bits, &value, 4);
  write_u32(out, bits);
}

bool read_f32(std::istream& in, float& value) {
  uint32_t bits;
  if (!read_u32(in, bits)) return false;
  std::memcpy(&value, &bits, 4);
  return true;
}

Dataset parse_headerless(std::ifstream& in) {
  uint32_t dim = 0;
  std::vector<double> coords;
  uint32_t row_dim;
  while (read_u32(in, row_dim)) {
    if (row_dim == 0) throw Error(ErrorCode::format_error, "vector with zero dimension");
    if (dim == 0) {
      dim = row_dim;
    } else if (row_dim != dim) {
      throw Error(ErrorCode::format_error, "inconsistent vector dimensions");
    }
    for (uint32_t j = 0; j < dim; ++j) {
      float v;
      if (!read_f32(in, v)) throw Error(ErrorCode::format_error, "truncated vector payload");
      coords.push_back(static_cast<double>(v));
    }
  }
  if (dim == 0) throw Error(ErrorCode::format_error, "empty vector file");
  return Dataset(dim, std::move(coords));
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
  out.write(kVecbinMagic, 4);
  out.put(static_cast<char>(kVecbinVersion));
  write_u32(out, dataset.size());
  write_u32(out, dataset.dim());
  for (double c : dataset.coords()) write_f32(out, static_cast<float>(c));
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open: " + path);

  char magic[4];
  if (!in.read(magic, 4)) throw Error(ErrorCode::format_error, "file too short: " + path);
  if (std::memcmp(magic, kVecbinMagic, 4) != 0) {
    // headerless per-vector layout: the first u32 was a dimension prefix
    in.seekg(0);
    return parse_headerless(in);
  }

  int version = in.get();
  if (version != kVecbinVersion) {
    throw Error(ErrorCode::format_error, "unsupported dataset format version");
  }
  uint32_t n, d;
  if (!read_u32(in, n) || !read_u32(in, d)) {
    throw Error(ErrorCode::format_error, "truncated dataset header");
  }
  if (d == 0) throw Error(ErrorCode::format_error, "dataset dimension must be >= 1");
  std::vector<double> coords;
  coords.reserve(static_cast<size_t>(n) * d);
  for (uint64_t i = 0; i < static_cast<uint64_t>(n) * d; ++i) {
    float value;
    if (!read_f32(in, value)) throw Error(ErrorCode::format_error, "truncated dataset payload");
    coords.push_back(static_cast<double>(value));
  }
  char extra;
  if (in.read(&extra, 1)) throw Error(ErrorCode::format_error, "trailing bytes after payload");
  return Dataset(d, std::move(coords));
}

}  // namespace mrng
