#include "ces/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ces {

namespace {

const WeightVector& require_pair(const std::optional<WeightVector>& theta) {
  if (!theta || theta->size() != 2) {
    throw std::invalid_argument("Cobb-Douglas level set needs exactly two weights");
  }
  return *theta;
}

bool usable(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

std::optional<double> solve_unit_level(const Exponent& e, double x1,
                                       const std::optional<WeightVector>& theta) {
  if (!(x1 > 0.0)) return std::nullopt;
  switch (e.kind()) {
    case ExponentKind::neg_infinity:
      return x1 >= 1.0 ? std::optional<double>(1.0) : std::nullopt;
    case ExponentKind::pos_infinity:
      return x1 <= 1.0 ? std::optional<double>(1.0) : std::nullopt;
    case ExponentKind::cobb_douglas: {
      const auto& w = require_pair(theta);
      const double x2 = std::pow(x1, -w[0] / w[1]);
      return usable(x2) ? std::optional<double>(x2) : std::nullopt;
    }
    case ExponentKind::finite: break;
  }
  const double r = e.value();
  const double remainder = 1.0 - std::pow(x1, r);
  if (!(remainder > 0.0)) return std::nullopt;
  const double x2 = std::pow(remainder, 1.0 / r);
  return usable(x2) ? std::optional<double>(x2) : std::nullopt;
}

std::vector<BallPoint> ball_points(const Exponent& e, std::size_t n,
                                   const std::optional<WeightVector>& theta) {
  if (n < 2) throw std::invalid_argument("ball_points needs n >= 2");

  double lo = kBallGridMin;
  double hi = kBallGridMax;
  bool lo_open = false;
  bool hi_open = false;
  switch (e.kind()) {
    case ExponentKind::neg_infinity: lo = 1.0; break;
    case ExponentKind::pos_infinity: hi = 1.0; break;
    case ExponentKind::cobb_douglas: {
      const auto& w = require_pair(theta);
      // x2 = x1^{-k} stays a normal double while |k ln x1| < 700.
      const double k = w[0] / w[1];
      lo = std::max(lo, std::exp(-700.0 / k));
      hi = std::min(hi, std::exp(700.0 / k));
      break;
    }
    case ExponentKind::finite:
      // 1 - x1^r > 0 needs x1 < 1 for r > 0 and x1 > 1 for r < 0.
      if (e.value() > 0.0) {
        hi = 1.0;
        hi_open = true;
      } else {
        lo = 1.0;
        lo_open = true;
      }
      break;
  }

  const double log_lo = std::log(lo);
  const double log_span = std::log(hi) - log_lo;
  // Number of intervals between grid nodes; an open end drops one node.
  const double intervals = static_cast<double>(lo_open || hi_open ? n : n - 1);
  const std::size_t first = lo_open ? 1 : 0;

  std::vector<BallPoint> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double step = static_cast<double>(k + first);
    // Pin the grid ends so closed endpoints are hit exactly.
    const double x1 = step == 0.0         ? lo
                      : step == intervals ? hi
                                          : std::exp(log_lo + log_span * step / intervals);
    if (auto x2 = solve_unit_level(e, x1, theta)) out.push_back({x1, *x2});
  }
  if (out.empty()) throw std::domain_error("no positive solution of ||x|| = 1 in the grid range");
  return out;
}

}  // namespace ces
