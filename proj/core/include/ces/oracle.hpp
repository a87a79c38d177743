#pragma once

// Independent checks for the closed forms: a brute-force expenditure
// minimizer, central finite differences, and seeded random sampling of the
// inequalities. The minimizer only evaluates U(x); the finite-difference
// routes differentiate e and nu numerically.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ces/lr_core.hpp"
#include "ces/nest_tree.hpp"

namespace ces::oracle {

struct OracleConfig {
  std::uint64_t seed = 42;
  std::size_t n_samples = 10000;
  std::size_t dim_min = 2;
  std::size_t dim_max = 8;
  double r_min = -5.0;
  double r_max = 0.99;
  double zero_band = 1e-3;            // finite draws avoid |r| < zero_band
  double cd_probability = 0.2;        // chance a tree node is Cobb-Douglas
  double weighted_probability = 0.25; // chance a finite-r node carries weights
  std::size_t max_depth = 3;
  double fd_step_rel = 1e-5;
  std::size_t refine_iters = 60;
  double value_min = 0.5;             // range for u, m and tree prices
  double value_max = 2.0;
  unsigned threads = 0;               // 0: hardware concurrency

  /// Throws std::invalid_argument on nonpositive counts or unordered ranges.
  void validate() const;
};

struct OracleReport {
  std::string name;
  std::size_t n_tested = 0;
  std::size_t n_violations = 0;
  std::optional<double> worst_relative_gap;  // empty when nothing was tested
  std::string worst_case_inputs;             // JSON text of the worst instance
};

struct InequalitySuiteReport {
  OracleReport young;
  OracleReport reverse_holder;
  OracleReport l0_holder;
  OracleReport direct_sum;

  std::size_t total_violations() const noexcept {
    return young.n_violations + reverse_holder.n_violations + l0_holder.n_violations +
           direct_sum.n_violations;
  }
};

/// Cheap deterministic generator. Every sample gets its own stream derived
/// from (seed, stream, index), so results do not depend on thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  double uniform(double lo, double hi);      // [lo, hi)
  double log_uniform(double lo, double hi);  // lo, hi > 0
  std::size_t index(std::size_t lo, std::size_t hi);  // inclusive
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Finite r uniform on [r_min, r_max] outside the band around zero.
double random_finite_exponent(Rng& rng, const OracleConfig& cfg);
WeightVector random_weights(Rng& rng, std::size_t n);

/// Random partition tree over goods 0..n_goods-1 (good ids shuffled).
/// Target depth is 1 + Geometric(1/2) capped at cfg.max_depth; internal
/// nodes above the bottom level split into 2-4 groups; exponents are drawn
/// with random_finite_exponent, Cobb-Douglas with cfg.cd_probability.
NestTree random_tree(Rng& rng, const OracleConfig& cfg, std::size_t n_goods);

struct BruteForceResult {
  PositiveVector bundle;
  double cost = 0.0;
  std::size_t evaluations = 0;
};

/// Minimizes p.x subject to U(x) = u by searching rays: U(t d) = t U(d), so
/// the cost along direction d is u (p.d) / U(d). Directions start from
/// random simplex draws and are refined by multiplicative pattern steps
/// along each coordinate and each pair of coordinates. Never calls the
/// closed forms.
BruteForceResult minimize_expenditure_bruteforce(const NodeIndexing& tree, double u,
                                                 const PositiveVector& p, const OracleConfig& cfg);

using ScalarField = std::function<double(const PositiveVector&)>;

/// Central differences with h_i = step_rel * p_i. Throws
/// std::invalid_argument unless 0 < step_rel < 1.
std::vector<double> finite_diff_gradient(const ScalarField& f, const PositiveVector& p,
                                         double step_rel);

/// Shephard's lemma route: finite-difference gradient of e(u, .) at p.
std::vector<double> shephard_gradient(const NodeIndexing& tree, double u, const PositiveVector& p,
                                      double step_rel);

/// Roy's identity route: -(d nu / dp_i) / (d nu / dm), both by finite differences.
std::vector<double> roy_demand(const NodeIndexing& tree, double m, const PositiveVector& p,
                               double step_rel);

/// Largest coordinatewise relative error between two vectors.
double max_relative_error(std::span<const double> approx, std::span<const double> exact);

/// Runs young_gap, reverse_holder_gap, l0_holder_gap and
/// direct_sum_holder_gap on cfg.n_samples random instances each.
InequalitySuiteReport sample_inequalities(const OracleConfig& cfg);

struct AgreementReport {
  std::size_t n_tested = 0;
  std::size_t n_undercut = 0;   // brute force below closed form by more than 1e-10 relative
  std::size_t n_mismatch = 0;   // |brute - closed| / closed above the agreement tolerance
  double min_relative_difference = 0.0;
  double max_relative_difference = 0.0;
  std::string worst_case_inputs;
};

inline constexpr double kAgreementTolerance = 1e-4;

/// Brute-force vs closed-form expenditure on n_instances random (tree, u, p).
/// Trees use dims [cfg.dim_min, min(cfg.dim_max, 6)].
AgreementReport check_oracle_agreement(const OracleConfig& cfg, std::size_t n_instances);

}  // namespace ces::oracle
