#pragma once

// Seeded random demand instances shared by the unit and acceptance tests.

#include <cstdint>
#include <vector>

#include "ces/nest_tree.hpp"
#include "ces/oracle.hpp"

namespace ces::testing {

struct DemandInstance {
  NestTree tree;
  NodeIndexing indexing;
  double u = 1.0;
  double m = 1.0;
  PositiveVector p;
};

/// Instance i of stream `stream`: a random tree over 2-8 goods with the
/// default exponent ranges, and u, m, p drawn log-uniformly from
/// [cfg.value_min, cfg.value_max].
inline DemandInstance random_instance(const oracle::OracleConfig& cfg, std::uint64_t stream,
                                      std::uint64_t i) {
  oracle::Rng rng(cfg.seed, stream, i);
  const std::size_t n = rng.index(cfg.dim_min, cfg.dim_max);
  NestTree tree = oracle::random_tree(rng, cfg, n);
  NodeIndexing indexing = validate_tree(tree, n);
  const double u = rng.log_uniform(cfg.value_min, cfg.value_max);
  const double m = rng.log_uniform(cfg.value_min, cfg.value_max);
  std::vector<double> p(n);
  for (double& v : p) v = rng.log_uniform(cfg.value_min, cfg.value_max);
  return {std::move(tree), std::move(indexing), u, m, PositiveVector::prices(std::move(p))};
}

struct TwoLevelInstance {
  double r = 0.5;                          // outer exponent
  std::vector<double> r_nest;              // inner exponent per nest
  std::vector<std::vector<double>> p;      // prices, grouped by nest
  double u = 1.0;
  double m = 1.0;

  /// The same model as a nest tree; goods are numbered nest by nest.
  NestTree tree() const;
  PositiveVector flat_prices() const;
};

TwoLevelInstance random_two_level(std::uint64_t seed, std::uint64_t i);

/// The two-level Armington Hicksian and Marshallian demands written out
/// literally, flattened nest by nest:
///   x_ij(u,p) = u |P|_s^sigma P_i^-sigma |p_i|_{s_i}^sigma_i p_ij^-sigma_i
///   x_ij(m,p) = m P_i^s / |P|_s^s * p_ij^(s_i - 1) / |p_i|_{s_i}^s_i
/// with P_i = |p_i|_{s_i}, s = r/(r-1), sigma = 1 - s.
std::vector<double> armington_hicksian(const TwoLevelInstance& inst);
std::vector<double> armington_marshallian(const TwoLevelInstance& inst);

}  // namespace ces::testing
