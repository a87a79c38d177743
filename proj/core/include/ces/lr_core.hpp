#pragma once

// L^r quasinorms on positive vectors and the inequality kernel built on
// them (extended Young, reverse Hölder and its Cobb-Douglas limit).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ces {

/// Tolerance used when checking that weights sum to one.
inline constexpr double kWeightSumTolerance = 1e-9;

/// Relative slack allowed on inequality checks before counting a violation.
inline constexpr double kInequalitySlack = 1e-10;

enum class ExponentKind { finite, cobb_douglas, neg_infinity, pos_infinity };

/// The CES parameter r. Cobb-Douglas is the r -> 0 limit and needs weights
/// wherever it is evaluated; the infinities are the Leontief (min) and max
/// limits.
class Exponent {
 public:
  /// Throws std::domain_error for r == 0 or non-finite r.
  static Exponent finite(double r);
  static Exponent cobb_douglas() noexcept { return Exponent(ExponentKind::cobb_douglas, 0.0); }
  static Exponent neg_infinity() noexcept;
  static Exponent pos_infinity() noexcept;

  /// Maps 0 to Cobb-Douglas and +-inf to the limits, anything else to finite.
  static Exponent from_value(double r);

  ExponentKind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == ExponentKind::finite; }

  /// r itself; 0 for Cobb-Douglas and +-infinity for the limits.
  double value() const noexcept { return r_; }

  /// True when the closed-form duals apply: finite r < 1, or Cobb-Douglas.
  bool has_dual() const noexcept;

  /// s with 1/r + 1/s = 1. Cobb-Douglas is self-dual. Throws std::domain_error
  /// when has_dual() is false.
  Exponent dual() const;

  /// Elasticity of substitution 1/(1-r); 1 for Cobb-Douglas.
  double sigma() const;

  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  Exponent(ExponentKind kind, double r) noexcept : kind_(kind), r_(r) {}

  ExponentKind kind_;
  double r_;
};

/// s = r/(r-1). Requires finite r < 1, r != 0.
double dual_exponent(double r);

/// sigma = 1/(1-r). Requires finite r < 1.
double elasticity(double r);

enum class VectorRole { quantity, price };

/// Nonempty vector of strictly positive finite entries, tagged with what the
/// entries measure.
class PositiveVector {
 public:
  /// Throws std::invalid_argument if empty or any entry is not > 0 and finite.
  PositiveVector(std::vector<double> values, VectorRole role);

  static PositiveVector quantities(std::vector<double> values) {
    return PositiveVector(std::move(values), VectorRole::quantity);
  }
  static PositiveVector prices(std::vector<double> values) {
    return PositiveVector(std::move(values), VectorRole::price);
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  VectorRole role() const noexcept { return role_; }

  /// Copy scaled by alpha > 0.
  PositiveVector scaled(double alpha) const;

 private:
  std::vector<double> values_;
  VectorRole role_;
};

/// Positive weights on the unit simplex. Accepted when the sum is within
/// kWeightSumTolerance of 1, then renormalized.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> theta);
  WeightVector(std::initializer_list<double> theta) : WeightVector(std::vector<double>(theta)) {}

  /// Uniform weights 1/n.
  static WeightVector uniform(std::size_t n);

  std::size_t size() const noexcept { return theta_.size(); }
  double operator[](std::size_t i) const noexcept { return theta_[i]; }
  std::span<const double> values() const noexcept { return theta_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> theta_;
};

struct InequalityGapReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;

  static InequalityGapReport from(double lhs, double rhs);
};

/// ||x||_r for finite r, min for -inf, max for +inf. Cobb-Douglas throws
/// std::domain_error; use weighted_norm.
double lr_norm(const PositiveVector& x, const Exponent& e);

/// ||theta^{1/r} x||_r = (sum theta_i x_i^r)^{1/r} for finite r, and
/// prod x_i^{theta_i} for Cobb-Douglas. Infinite exponents ignore the
/// weights.
double weighted_norm(const PositiveVector& x, const WeightVector& theta, const Exponent& e);

/// ab - (a^r/r + b^s/s); nonnegative for r < 1, r != 0.
InequalityGapReport young_gap(double a, double b, double r);

/// x.y - ||x||_r ||y||_s.
InequalityGapReport reverse_holder_gap(const PositiveVector& x, const PositiveVector& y, double r);

/// x.y - ||x||_{0,theta} ||theta^{-1} y||_{0,theta}.
InequalityGapReport l0_holder_gap(const PositiveVector& x, const PositiveVector& y,
                                  const WeightVector& theta);

double dot(std::span<const double> x, std::span<const double> y);

namespace detail {

// Unchecked kernels shared with the nest-tree evaluator. Inputs are assumed
// positive and nonempty; these are the single evaluation path for norms.
double norm_unchecked(std::span<const double> x, const Exponent& e);
double weighted_norm_unchecked(std::span<const double> x, std::span<const double> theta,
                               const Exponent& e);

// Log-domain twins: take ln x_i and return ln ||x||. Used where a norm may
// leave the double range while the quantity of interest (a product of
// norms, a ratio of prices) does not.
double log_norm_from_logs(std::span<const double> log_x, const Exponent& e);
double log_weighted_norm_from_logs(std::span<const double> log_x, std::span<const double> theta,
                                   const Exponent& e);

std::vector<double> logs_of(std::span<const double> x);

}  // namespace detail

}  // namespace ces
