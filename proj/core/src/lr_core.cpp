#include "ces/lr_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ces {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Above this, x^r may leave the double range and the scaled form is used.
constexpr double kLogDomainThreshold = 600.0;

double max_abs_scaled_log(std::span<const double> x, double r) {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, std::abs(r * std::log(v)));
  return worst;
}

}  // namespace

Exponent Exponent::finite(double r) {
  if (!std::isfinite(r)) throw std::domain_error("finite exponent must be a finite number");
  if (r == 0.0) throw std::domain_error("finite exponent must be nonzero; use cobb_douglas for r = 0");
  return Exponent(ExponentKind::finite, r);
}

Exponent Exponent::neg_infinity() noexcept { return Exponent(ExponentKind::neg_infinity, -kInf); }
Exponent Exponent::pos_infinity() noexcept { return Exponent(ExponentKind::pos_infinity, kInf); }

Exponent Exponent::from_value(double r) {
  if (std::isnan(r)) throw std::domain_error("exponent is NaN");
  if (r == 0.0) return cobb_douglas();
  if (r == -kInf) return neg_infinity();
  if (r == kInf) return pos_infinity();
  return finite(r);
}

bool Exponent::has_dual() const noexcept {
  return kind_ == ExponentKind::cobb_douglas || (kind_ == ExponentKind::finite && r_ < 1.0);
}

Exponent Exponent::dual() const {
  if (kind_ == ExponentKind::cobb_douglas) return *this;
  if (kind_ != ExponentKind::finite) {
    throw std::domain_error("exponent " + to_string() + " has no closed-form dual");
  }
  return finite(dual_exponent(r_));
}

double Exponent::sigma() const {
  if (kind_ == ExponentKind::cobb_douglas) return 1.0;
  if (kind_ != ExponentKind::finite) {
    throw std::domain_error("elasticity undefined for exponent " + to_string());
  }
  return elasticity(r_);
}

std::string Exponent::to_string() const {
  switch (kind_) {
    case ExponentKind::cobb_douglas: return "cobb_douglas";
    case ExponentKind::neg_infinity: return "-inf";
    case ExponentKind::pos_infinity: return "inf";
    case ExponentKind::finite: break;
  }
  std::ostringstream os;
  os.precision(17);
  os << r_;
  return os.str();
}

double dual_exponent(double r) {
  if (!std::isfinite(r) || r == 0.0 || r >= 1.0) {
    throw std::domain_error("dual exponent requires finite r < 1, r != 0");
  }
  return r / (r - 1.0);
}

double elasticity(double r) {
  if (!std::isfinite(r) || r >= 1.0) throw std::domain_error("elasticity requires finite r < 1");
  return 1.0 / (1.0 - r);
}

PositiveVector::PositiveVector(std::vector<double> values, VectorRole role)
    : values_(std::move(values)), role_(role) {
  if (values_.empty()) throw std::invalid_argument("positive vector must be nonempty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw std::invalid_argument("entry " + std::to_string(i) + " is not a positive finite number");
    }
  }
}

PositiveVector PositiveVector::scaled(double alpha) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= alpha;
  return PositiveVector(std::move(out), role_);
}

WeightVector::WeightVector(std::vector<double> theta) : theta_(std::move(theta)) {
  if (theta_.empty()) throw std::invalid_argument("weight vector must be nonempty");
  for (double t : theta_) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("weights must be positive");
  }
  const double total = std::accumulate(theta_.begin(), theta_.end(), 0.0);
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument("weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  for (double& t : theta_) t /= total;
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("weight vector must be nonempty");
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

InequalityGapReport InequalityGapReport::from(double lhs, double rhs) {
  InequalityGapReport out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.gap = lhs - rhs;
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  // An infinite side means the other is negligible; the limit of gap/scale is +-1.
  out.relative_gap = std::isfinite(scale) ? out.gap / scale : std::copysign(1.0, out.gap);
  return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

namespace detail {

double norm_unchecked(std::span<const double> x, const Exponent& e) {
  switch (e.kind()) {
    case ExponentKind::neg_infinity: return *std::min_element(x.begin(), x.end());
    case ExponentKind::pos_infinity: return *std::max_element(x.begin(), x.end());
    case ExponentKind::cobb_douglas:
      throw std::domain_error("Cobb-Douglas norm requires weights");
    case ExponentKind::finite: break;
  }
  const double r = e.value();
  if (max_abs_scaled_log(x, r) <= kLogDomainThreshold) {
    double sum = 0.0;
    for (double v : x) sum += std::pow(v, r);
    return std::pow(sum, 1.0 / r);
  }
  // ||x||_r = m (sum (x_i/m)^r)^{1/r}; every term is <= 1 with the pivot on the dominant side.
  const double m = r > 0.0 ? *std::max_element(x.begin(), x.end())
                           : *std::min_element(x.begin(), x.end());
  double sum = 0.0;
  for (double v : x) sum += std::pow(v / m, r);
  return m * std::pow(sum, 1.0 / r);
}

double weighted_norm_unchecked(std::span<const double> x, std::span<const double> theta,
                               const Exponent& e) {
  switch (e.kind()) {
    case ExponentKind::neg_infinity:
    case ExponentKind::pos_infinity: return norm_unchecked(x, e);
    case ExponentKind::cobb_douglas: {
      double log_sum = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) log_sum += theta[i] * std::log(x[i]);
      return std::exp(log_sum);
    }
    case ExponentKind::finite: break;
  }
  const double r = e.value();
  const double spread = max_abs_scaled_log(x, r);
  if (spread <= 1.0) {
    // Near the Cobb-Douglas limit: sum theta_i x_i^r = 1 + sum theta_i expm1(r ln x_i).
    double excess = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) excess += theta[i] * std::expm1(r * std::log(x[i]));
    return std::exp(std::log1p(excess) / r);
  }
  if (spread <= kLogDomainThreshold) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += theta[i] * std::pow(x[i], r);
    return std::pow(sum, 1.0 / r);
  }
  const double m = r > 0.0 ? *std::max_element(x.begin(), x.end())
                           : *std::min_element(x.begin(), x.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += theta[i] * std::pow(x[i] / m, r);
  return m * std::pow(sum, 1.0 / r);
}

double log_norm_from_logs(std::span<const double> log_x, const Exponent& e) {
  switch (e.kind()) {
    case ExponentKind::neg_infinity: return *std::min_element(log_x.begin(), log_x.end());
    case ExponentKind::pos_infinity: return *std::max_element(log_x.begin(), log_x.end());
    case ExponentKind::cobb_douglas:
      throw std::domain_error("Cobb-Douglas norm requires weights");
    case ExponentKind::finite: break;
  }
  const double r = e.value();
  double top = -kInf;
  for (double l : log_x) top = std::max(top, r * l);
  double sum = 0.0;
  for (double l : log_x) sum += std::exp(r * l - top);
  return (top + std::log(sum)) / r;
}

double log_weighted_norm_from_logs(std::span<const double> log_x, std::span<const double> theta,
                                   const Exponent& e) {
  switch (e.kind()) {
    case ExponentKind::neg_infinity:
    case ExponentKind::pos_infinity: return log_norm_from_logs(log_x, e);
    case ExponentKind::cobb_douglas: {
      double sum = 0.0;
      for (std::size_t i = 0; i < log_x.size(); ++i) sum += theta[i] * log_x[i];
      return sum;
    }
    case ExponentKind::finite: break;
  }
  const double r = e.value();
  double spread = 0.0;
  for (double l : log_x) spread = std::max(spread, std::abs(r * l));
  if (spread <= 1.0) {
    double excess = 0.0;
    for (std::size_t i = 0; i < log_x.size(); ++i) excess += theta[i] * std::expm1(r * log_x[i]);
    return std::log1p(excess) / r;
  }
  double top = -kInf;
  for (std::size_t i = 0; i < log_x.size(); ++i) top = std::max(top, std::log(theta[i]) + r * log_x[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < log_x.size(); ++i) sum += std::exp(std::log(theta[i]) + r * log_x[i] - top);
  return (top + std::log(sum)) / r;
}

std::vector<double> logs_of(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::log(x[i]);
  return out;
}

}  // namespace detail

double lr_norm(const PositiveVector& x, const Exponent& e) {
  return detail::norm_unchecked(x.values(), e);
}

double weighted_norm(const PositiveVector& x, const WeightVector& theta, const Exponent& e) {
  if (x.size() != theta.size()) throw std::invalid_argument("weighted_norm: length mismatch");
  return detail::weighted_norm_unchecked(x.values(), theta.values(), e);
}

InequalityGapReport young_gap(double a, double b, double r) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("young_gap requires a > 0 and b > 0");
  const double s = dual_exponent(r);
  return InequalityGapReport::from(a * b, std::pow(a, r) / r + std::pow(b, s) / s);
}

InequalityGapReport reverse_holder_gap(const PositiveVector& x, const PositiveVector& y, double r) {
  if (x.size() != y.size()) throw std::invalid_argument("reverse_holder_gap: length mismatch");
  const double s = dual_exponent(r);
  // Each norm alone can over- or underflow near r = 0 (n^{1/r}); their product cannot.
  const double log_rhs = detail::log_norm_from_logs(detail::logs_of(x.values()), Exponent::finite(r)) +
                         detail::log_norm_from_logs(detail::logs_of(y.values()), Exponent::finite(s));
  return InequalityGapReport::from(dot(x.values(), y.values()), std::exp(log_rhs));
}

InequalityGapReport l0_holder_gap(const PositiveVector& x, const PositiveVector& y,
                                  const WeightVector& theta) {
  if (x.size() != y.size() || x.size() != theta.size()) {
    throw std::invalid_argument("l0_holder_gap: length mismatch");
  }
  std::vector<double> log_y_over_theta(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) log_y_over_theta[i] = std::log(y[i] / theta[i]);
  const auto cd = Exponent::cobb_douglas();
  const double log_rhs =
      detail::log_weighted_norm_from_logs(detail::logs_of(x.values()), theta.values(), cd) +
      detail::log_weighted_norm_from_logs(log_y_over_theta, theta.values(), cd);
  return InequalityGapReport::from(dot(x.values(), y.values()), std::exp(log_rhs));
}

}  // namespace ces
