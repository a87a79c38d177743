#include "instances.hpp"

#include <cmath>

namespace ces::testing {

namespace {

constexpr std::uint64_t kTwoLevelStream = 101;

double power_sum_norm(const std::vector<double>& v, double r) {
  double sum = 0.0;
  for (double x : v) sum += std::pow(x, r);
  return std::pow(sum, 1.0 / r);
}

std::vector<double> nest_price_indices(const TwoLevelInstance& inst) {
  std::vector<double> P;
  for (std::size_t i = 0; i < inst.p.size(); ++i) {
    const double r = inst.r_nest[i];
    P.push_back(power_sum_norm(inst.p[i], r / (r - 1.0)));
  }
  return P;
}

}  // namespace

NestTree TwoLevelInstance::tree() const {
  std::vector<NestTree> nests;
  std::size_t good = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<NestTree> leaves;
    for (std::size_t j = 0; j < p[i].size(); ++j) leaves.push_back(NestTree::leaf(good++));
    nests.push_back(NestTree::ces(r_nest[i], std::move(leaves)));
  }
  return NestTree::ces(r, std::move(nests));
}

PositiveVector TwoLevelInstance::flat_prices() const {
  std::vector<double> out;
  for (const auto& nest : p) out.insert(out.end(), nest.begin(), nest.end());
  return PositiveVector::prices(std::move(out));
}

TwoLevelInstance random_two_level(std::uint64_t seed, std::uint64_t i) {
  oracle::OracleConfig cfg;
  cfg.seed = seed;
  oracle::Rng rng(seed, kTwoLevelStream, i);
  TwoLevelInstance inst;
  inst.r = oracle::random_finite_exponent(rng, cfg);
  const std::size_t nests = rng.index(2, 4);
  for (std::size_t k = 0; k < nests; ++k) {
    inst.r_nest.push_back(oracle::random_finite_exponent(rng, cfg));
    std::vector<double> prices(rng.index(1, 3));
    for (double& v : prices) v = rng.log_uniform(cfg.value_min, cfg.value_max);
    inst.p.push_back(std::move(prices));
  }
  inst.u = rng.log_uniform(cfg.value_min, cfg.value_max);
  inst.m = rng.log_uniform(cfg.value_min, cfg.value_max);
  return inst;
}

std::vector<double> armington_hicksian(const TwoLevelInstance& inst) {
  const double s = inst.r / (inst.r - 1.0);
  const double sigma = 1.0 - s;
  const std::vector<double> P = nest_price_indices(inst);
  const double P_norm = power_sum_norm(P, s);
  std::vector<double> x;
  for (std::size_t i = 0; i < inst.p.size(); ++i) {
    const double s_i = inst.r_nest[i] / (inst.r_nest[i] - 1.0);
    const double sigma_i = 1.0 - s_i;
    const double p_norm = power_sum_norm(inst.p[i], s_i);
    for (double p_ij : inst.p[i]) {
      x.push_back(inst.u * std::pow(P_norm, sigma) * std::pow(P[i], -sigma) * std::pow(p_norm, sigma_i) *
                  std::pow(p_ij, -sigma_i));
    }
  }
  return x;
}

std::vector<double> armington_marshallian(const TwoLevelInstance& inst) {
  const double s = inst.r / (inst.r - 1.0);
  const std::vector<double> P = nest_price_indices(inst);
  const double P_norm = power_sum_norm(P, s);
  std::vector<double> x;
  for (std::size_t i = 0; i < inst.p.size(); ++i) {
    const double s_i = inst.r_nest[i] / (inst.r_nest[i] - 1.0);
    const double p_norm = power_sum_norm(inst.p[i], s_i);
    for (double p_ij : inst.p[i]) {
      x.push_back(inst.m * std::pow(P[i], s) / std::pow(P_norm, s) * std::pow(p_ij, s_i - 1.0) /
                  std::pow(p_norm, s_i));
    }
  }
  return x;
}

}  // namespace ces::testing
