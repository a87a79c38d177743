#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "ces/demand.hpp"
#include "ces/lr_core.hpp"
#include "ces/nest_tree.hpp"
#include "ces/oracle.hpp"

using namespace ces;

namespace {

std::vector<double> log_uniform_vector(std::size_t n, std::uint64_t seed) {
  oracle::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.log_uniform(0.1, 10.0);
  return v;
}

struct Instance {
  NodeIndexing tree;
  PositiveVector p;
};

Instance random_instance(std::size_t n, std::uint64_t seed) {
  oracle::OracleConfig cfg;
  oracle::Rng rng(seed, 1, 0);
  return {validate_tree(oracle::random_tree(rng, cfg, n), n), PositiveVector::prices(log_uniform_vector(n, seed))};
}

}  // namespace

static void BM_LrNorm(benchmark::State& state) {
  const auto x = PositiveVector::quantities(log_uniform_vector(static_cast<std::size_t>(state.range(0)), 1));
  const auto e = Exponent::finite(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(lr_norm(x, e));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LrNorm)->RangeMultiplier(8)->Range(2, 4096)->Complexity();

static void BM_WeightedCobbDouglas(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto x = PositiveVector::quantities(log_uniform_vector(n, 2));
  const auto theta = WeightVector::uniform(n);
  const auto e = Exponent::cobb_douglas();
  for (auto _ : state) benchmark::DoNotOptimize(weighted_norm(x, theta, e));
}
BENCHMARK(BM_WeightedCobbDouglas)->RangeMultiplier(8)->Range(2, 4096);

static void BM_AggregatePrice(benchmark::State& state) {
  const auto inst = random_instance(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_price(inst.tree, inst.p).root);
}
BENCHMARK(BM_AggregatePrice)->DenseRange(2, 8, 3)->Arg(64)->Arg(512);

static void BM_MarshallianDemand(benchmark::State& state) {
  const auto inst = random_instance(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(marshallian_demand(inst.tree, 10.0, inst.p));
}
BENCHMARK(BM_MarshallianDemand)->DenseRange(2, 8, 3)->Arg(64)->Arg(512);

static void BM_BruteForceExpenditure(benchmark::State& state) {
  const auto inst = random_instance(static_cast<std::size_t>(state.range(0)), 5);
  const oracle::OracleConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(oracle::minimize_expenditure_bruteforce(inst.tree, 1.0, inst.p, cfg).cost);
}
BENCHMARK(BM_BruteForceExpenditure)->DenseRange(2, 8, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
