#pragma once

#include <optional>

#include "mrng/dataset.hpp"

namespace mrng {

double squared_distance(PointView a, PointView b);

/// Euclidean (l2) distance. Throws on dimension mismatch.
double distance(PointView a, PointView b);

/// True iff z lies strictly inside both open balls of radius |xy| centered
/// at x and at y. Ties sit on the boundary and are outside. Throws if x and
/// y coincide (the region is undefined).
bool in_lune(PointView x, PointView y, PointView z);

/// Unsigned angle in [0, pi] between rays v->q and v->u. The cosine is
/// clamped to [-1, 1] before acos so collinear inputs cannot round to NaN.
double angle_at(PointView v, PointView q, PointView u);

// Reach thresholds for the conflict-edge filter. For a node v at distance r
// from a query q and an out-edge v->u at angle theta = angle_at(v, q, u)
// with |uq| >= r, some point strictly inside the ball B_r(q) has u inside
// its lune with v if and only if |vu| < r * reach_f(theta). reach_g covers
// the witnesses whose bearing from the edge stays within pi/3, reach_h the
// rest; reach_f is their pointwise max (g is undefined past 5pi/6, where
// only h contributes). reach_s is the supremum term inside h, satisfying
// reach_h(theta) == 2*(cos(theta) + reach_s(theta)).
double reach_f(double theta);
std::optional<double> reach_g(double theta);
double reach_h(double theta);
double reach_s(double theta);

}  // namespace mrng
