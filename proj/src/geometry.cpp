#include "mrng/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mrng/error.hpp"

namespace mrng {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dims(PointView a, PointView b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch, "points have different dimensions");
  }
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw Error(ErrorCode::invalid_argument, "angle outside [0, pi]");
  }
}

}  // namespace

double squared_distance(PointView a, PointView b) {
  check_dims(a, b);
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

double distance(PointView a, PointView b) { return std::sqrt(squared_distance(a, b)); }

bool in_lune(PointView x, PointView y, PointView z) {
  check_dims(x, y);
  check_dims(x, z);
  double radius_sq = squared_distance(x, y);
  if (radius_sq == 0.0) {
    throw Error(ErrorCode::invalid_argument, "lune of two coincident points is undefined");
  }
  return squared_distance(x, z) < radius_sq && squared_distance(y, z) < radius_sq;
}

double angle_at(PointView v, PointView q, PointView u) {
  check_dims(v, q);
  check_dims(v, u);
  double qq = 0.0, uu = 0.0, qu = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    double a = q[i] - v[i];
    double b = u[i] - v[i];
    qq += a * a;
    uu += b * b;
    qu += a * b;
  }
  if (qq == 0.0 || uu == 0.0) {
    throw Error(ErrorCode::invalid_argument, "degenerate ray in angle computation");
  }
  double cosine = qu / (std::sqrt(qq) * std::sqrt(uu));
  cosine = std::clamp(cosine, -1.0, 1.0);
  return std::acos(cosine);
}

double reach_f(double theta) {
  check_theta(theta);
  if (theta <= kPi / 3.0) return 2.0;
  if (theta <= 2.0 * kPi / 3.0) return 2.0 * std::cos(theta - kPi / 3.0);
  return 2.0 * (std::cos(theta) + 1.0);
}

std::optional<double> reach_g(double theta) {
  check_theta(theta);
  if (theta <= kPi / 3.0) return 2.0;
  if (theta <= 5.0 * kPi / 6.0) return 2.0 * std::cos(theta - kPi / 3.0);
  return std::nullopt;
}

double reach_h(double theta) {
  check_theta(theta);
  if (theta <= 2.0 * kPi / 3.0) return 2.0 * std::cos(theta - kPi / 3.0);
  return 2.0 * (std::cos(theta) + 1.0);
}

double reach_s(double theta) {
  check_theta(theta);
  if (theta <= 2.0 * kPi / 3.0) return std::cos(theta - 2.0 * kPi / 3.0);
  return 1.0;
}

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::duplicate_points: return "duplicate_points";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::format_error: return "format_error";
    case ErrorCode::checksum_mismatch: return "checksum_mismatch";
    case ErrorCode::not_local_minimum: return "not_local_minimum";
    case ErrorCode::cap_exceeded: return "cap_exceeded";
  }
  return "unknown";
}

}  // namespace mrng
