#pragma once

// Points on the unit level set ||(x1, x2)|| = 1 in the positive quadrant.

#include <cstddef>
#include <optional>
#include <vector>

#include "ces/lr_core.hpp"

namespace ces {

inline constexpr double kBallGridMin = 1e-3;
inline constexpr double kBallGridMax = 1e3;

struct BallPoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// The x2 > 0 solving ||(x1, x2)|| = 1, or nullopt when none exists.
/// Cobb-Douglas needs two weights. For -inf (+inf) the solution at x1 = 1 is
/// a whole ray and x2 = 1 is returned.
std::optional<double> solve_unit_level(const Exponent& e, double x1,
                                       const std::optional<WeightVector>& theta = std::nullopt);

/// n points with x1 log-spaced over the part of [1e-3, 1e3] where a positive
/// solution exists. Open endpoints (x1 = 1 for finite r) are excluded.
/// Throws std::invalid_argument for n < 2 or missing weights and
/// std::domain_error when the range holds no solution.
std::vector<BallPoint> ball_points(const Exponent& e, std::size_t n,
                                   const std::optional<WeightVector>& theta = std::nullopt);

}  // namespace ces
