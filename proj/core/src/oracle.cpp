#include "ces/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ces/demand.hpp"
#include "ces/scenario.hpp"
#include "json.hpp"

namespace ces::oracle {

using nlohmann::json;

namespace {

// Stream ids keep the per-kind sample sequences independent of each other.
enum Stream : std::uint64_t {
  kYoungStream = 1,
  kReverseHolderStream = 2,
  kL0Stream = 3,
  kDirectSumStream = 4,
  kAgreementStream = 5,
  kBruteForceStream = 6,
};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

unsigned thread_count(const OracleConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(i) for i in [0, n). Each index writes only its own output slot, so
// the result is the same for any thread count.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads <= 1 || n < 2 * threads) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) f(i);
    });
  }
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.log_uniform(lo, hi);
  return v;
}

std::vector<double> to_vector(const PositiveVector& v) { return {v.values().begin(), v.values().end()}; }

template <class Instance, class Generate, class Evaluate, class Describe>
OracleReport run_kind(const char* name, Stream stream, const OracleConfig& cfg, Generate generate,
                      Evaluate evaluate, Describe describe) {
  OracleReport report;
  report.name = name;
  report.n_tested = cfg.n_samples;
  std::vector<double> gaps(cfg.n_samples);
  parallel_for(cfg.n_samples, thread_count(cfg), [&](std::size_t i) {
    Rng rng(cfg.seed, stream, i);
    gaps[i] = evaluate(generate(rng)).relative_gap;
  });
  if (gaps.empty()) return report;

  std::size_t worst = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] < -kInequalitySlack) ++report.n_violations;
    if (gaps[i] < gaps[worst]) worst = i;
  }
  report.worst_relative_gap = gaps[worst];
  // Regenerate the worst instance from its seed rather than storing all of them.
  Rng rng(cfg.seed, stream, worst);
  const Instance inst = generate(rng);
  json j = describe(inst);
  j["sample_index"] = worst;
  j["seed"] = cfg.seed;
  report.worst_case_inputs = j.dump();
  return report;
}

struct YoungInstance {
  double a, b, r;
};
struct VectorPairInstance {
  PositiveVector x, y;
  double r;
};
struct L0Instance {
  PositiveVector x, y;
  WeightVector theta;
};
struct DirectSumInstance {
  NestTree tree;
  PositiveVector x, p;
};

}  // namespace

void OracleConfig::validate() const {
  if (dim_min == 0 || dim_min > dim_max) throw std::invalid_argument("oracle: need 1 <= dim_min <= dim_max");
  if (!(r_min < r_max) || r_max >= 1.0) throw std::invalid_argument("oracle: need r_min < r_max < 1");
  if (zero_band < 0.0 || (r_min > -zero_band && r_max < zero_band)) {
    throw std::invalid_argument("oracle: r range lies inside the zero band");
  }
  if (cd_probability < 0.0 || cd_probability > 1.0 || weighted_probability < 0.0 ||
      weighted_probability > 1.0) {
    throw std::invalid_argument("oracle: probabilities must lie in [0, 1]");
  }
  if (max_depth == 0) throw std::invalid_argument("oracle: max_depth must be positive");
  if (!(fd_step_rel > 0.0 && fd_step_rel < 1.0)) throw std::invalid_argument("oracle: fd_step_rel must lie in (0, 1)");
  if (refine_iters == 0) throw std::invalid_argument("oracle: refine_iters must be positive");
  if (!(value_min > 0.0 && value_min <= value_max)) throw std::invalid_argument("oracle: need 0 < value_min <= value_max");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t state = seed;
  splitmix64(state);
  state ^= stream * 0xd1b54a32d192ed03ULL;
  splitmix64(state);
  state ^= index * 0xabc98388fb8fac03ULL;
  return splitmix64(state);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
    : engine_(derive_seed(seed, stream, index)) {}

double Rng::uniform(double lo, double hi) {
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

double Rng::log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

std::size_t Rng::index(std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
}

double random_finite_exponent(Rng& rng, const OracleConfig& cfg) {
  for (;;) {
    const double r = rng.uniform(cfg.r_min, cfg.r_max);
    if (std::abs(r) >= cfg.zero_band) return r;
  }
}

WeightVector random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) total += (x = rng.uniform(0.1, 1.0));
  for (double& x : w) x /= total;
  return WeightVector(std::move(w));
}

namespace {

NestTree build_tree(Rng& rng, const OracleConfig& cfg, std::span<const std::size_t> goods,
                    std::size_t levels_left) {
  std::vector<NestTree> children;
  if (levels_left <= 1 || goods.size() <= 2) {
    for (std::size_t g : goods) children.push_back(NestTree::leaf(g));
  } else {
    const std::size_t k = rng.index(2, std::min<std::size_t>(4, goods.size()));
    // k - 1 distinct cut points in 1..size-1.
    std::vector<std::size_t> cuts(goods.size() - 1);
    for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i] = i + 1;
    for (std::size_t i = 0; i + 1 < k; ++i) std::swap(cuts[i], cuts[rng.index(i, cuts.size() - 1)]);
    cuts.resize(k - 1);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(goods.size());
    std::size_t begin = 0;
    for (std::size_t end : cuts) {
      auto group = goods.subspan(begin, end - begin);
      if (group.size() == 1) {
        children.push_back(NestTree::leaf(group.front()));
      } else {
        children.push_back(build_tree(rng, cfg, group, levels_left - 1));
      }
      begin = end;
    }
  }
  const std::size_t arity = children.size();
  if (rng.bernoulli(cfg.cd_probability)) {
    return NestTree::cobb_douglas(random_weights(rng, arity), std::move(children));
  }
  const double r = random_finite_exponent(rng, cfg);
  std::optional<WeightVector> weights;
  if (rng.bernoulli(cfg.weighted_probability)) weights = random_weights(rng, arity);
  return NestTree::node(Exponent::finite(r), std::move(children), std::move(weights));
}

}  // namespace

NestTree random_tree(Rng& rng, const OracleConfig& cfg, std::size_t n_goods) {
  std::vector<std::size_t> goods(n_goods);
  for (std::size_t i = 0; i < n_goods; ++i) goods[i] = i;
  for (std::size_t i = n_goods; i > 1; --i) std::swap(goods[i - 1], goods[rng.index(0, i - 1)]);
  std::size_t levels = 1;
  while (levels < cfg.max_depth && rng.bernoulli(0.5)) ++levels;
  return build_tree(rng, cfg, goods, levels);
}

BruteForceResult minimize_expenditure_bruteforce(const NodeIndexing& tree, double u,
                                                 const PositiveVector& p, const OracleConfig& cfg) {
  if (!(u > 0.0)) throw std::domain_error("brute force: utility must be positive");
  if (p.size() != tree.n_goods()) throw std::invalid_argument("brute force: dimension mismatch");
  const std::size_t n = p.size();
  std::size_t evaluations = 0;

  // Directions are parametrized by log-coordinates z; d = exp(z - max z).
  auto direction = [](const std::vector<double>& z) {
    const double top = *std::max_element(z.begin(), z.end());
    std::vector<double> d(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) d[i] = std::exp(std::max(z[i] - top, -700.0));
    return PositiveVector::quantities(std::move(d));
  };
  // Cost of one unit of utility along the ray through d.
  auto unit_cost = [&](const std::vector<double>& z) {
    ++evaluations;
    const PositiveVector d = direction(z);
    return dot(p.values(), d.values()) / aggregate_quantity(tree, d).root;
  };

  std::vector<double> best_z(n, 0.0);
  double best = unit_cost(best_z);

  Rng rng(cfg.seed, kBruteForceStream, 0);
  const std::size_t starts = 16 * n;
  std::vector<double> z(n);
  for (std::size_t k = 0; k < starts && n > 1; ++k) {
    // Log of Exp(1) draws: uniform on the simplex after normalization.
    for (double& zi : z) zi = std::log(-std::log1p(-rng.uniform(0.0, 1.0)) + 1e-300);
    const double c = unit_cost(z);
    if (c < best) {
      best = c;
      best_z = z;
    }
  }

  // Pattern search over the coordinate axes and the pairwise differences
  // e_i - e_j; the latter follow valleys that trade one good against another.
  std::vector<std::pair<std::size_t, std::size_t>> moves;
  for (std::size_t i = 0; i < n; ++i) moves.emplace_back(i, i);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) moves.emplace_back(i, j);
  }
  std::vector<double> step(moves.size(), 1.0);
  for (std::size_t iter = 0; iter < cfg.refine_iters && n > 1; ++iter) {
    for (std::size_t m = 0; m < moves.size(); ++m) {
      const auto [i, j] = moves[m];
      bool improved = false;
      for (double sign : {1.0, -1.0}) {
        // Keep stepping (and doubling) in a direction while it pays off.
        for (int expand = 0; expand < 64; ++expand) {
          std::vector<double> trial = best_z;
          trial[i] += sign * step[m];
          if (j != i) trial[j] -= sign * step[m];
          const double c = unit_cost(trial);
          if (!(c < best)) break;
          best = c;
          best_z = std::move(trial);
          improved = true;
          step[m] *= 2.0;
        }
        if (improved) break;
      }
      step[m] *= improved ? 0.5 : 0.25;
    }
    if (*std::max_element(step.begin(), step.end()) < 1e-14) break;
  }

  const PositiveVector d = direction(best_z);
  const double scale = u / aggregate_quantity(tree, d).root;
  PositiveVector bundle = d.scaled(scale);
  const double cost = dot(p.values(), bundle.values());
  return BruteForceResult{std::move(bundle), cost, evaluations};
}

std::vector<double> finite_diff_gradient(const ScalarField& f, const PositiveVector& p, double step_rel) {
  if (!(step_rel > 0.0 && step_rel < 1.0)) {
    throw std::invalid_argument("finite difference step must lie in (0, 1) to keep arguments positive");
  }
  std::vector<double> grad(p.size());
  std::vector<double> work = to_vector(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double h = step_rel * p[i];
    work[i] = p[i] + h;
    const double up = f(PositiveVector(work, p.role()));
    work[i] = p[i] - h;
    const double down = f(PositiveVector(work, p.role()));
    work[i] = p[i];
    // Divide by the step actually represented in floating point.
    grad[i] = (up - down) / ((p[i] + h) - (p[i] - h));
  }
  return grad;
}

std::vector<double> shephard_gradient(const NodeIndexing& tree, double u, const PositiveVector& p,
                                      double step_rel) {
  return finite_diff_gradient([&](const PositiveVector& q) { return expenditure(tree, u, q); }, p,
                              step_rel);
}

std::vector<double> roy_demand(const NodeIndexing& tree, double m, const PositiveVector& p,
                               double step_rel) {
  const auto dv_dp =
      finite_diff_gradient([&](const PositiveVector& q) { return indirect_utility(tree, m, q); }, p, step_rel);
  const double h = step_rel * m;
  const double dv_dm =
      (indirect_utility(tree, m + h, p) - indirect_utility(tree, m - h, p)) / ((m + h) - (m - h));
  std::vector<double> out(dv_dp.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -dv_dp[i] / dv_dm;
  return out;
}

double max_relative_error(std::span<const double> approx, std::span<const double> exact) {
  if (approx.size() != exact.size()) throw std::invalid_argument("max_relative_error: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    worst = std::max(worst, std::abs(approx[i] - exact[i]) / std::abs(exact[i]));
  }
  return worst;
}

InequalitySuiteReport sample_inequalities(const OracleConfig& cfg) {
  cfg.validate();
  InequalitySuiteReport out;

  out.young = run_kind<YoungInstance>(
      "young", kYoungStream, cfg,
      [&](Rng& rng) {
        // (0, 10]: 10 * (1 - U) with U in [0, 1).
        const double a = 10.0 * (1.0 - rng.uniform(0.0, 1.0));
        const double b = 10.0 * (1.0 - rng.uniform(0.0, 1.0));
        return YoungInstance{a, b, random_finite_exponent(rng, cfg)};
      },
      [](const YoungInstance& in) { return young_gap(in.a, in.b, in.r); },
      [](const YoungInstance& in) { return json{{"a", in.a}, {"b", in.b}, {"r", in.r}}; });

  out.reverse_holder = run_kind<VectorPairInstance>(
      "reverse_holder", kReverseHolderStream, cfg,
      [&](Rng& rng) {
        const std::size_t n = rng.index(cfg.dim_min, cfg.dim_max);
        auto x = PositiveVector::quantities(random_vector(rng, n, 1e-2, 1e2));
        auto y = PositiveVector::prices(random_vector(rng, n, 1e-2, 1e2));
        return VectorPairInstance{std::move(x), std::move(y), random_finite_exponent(rng, cfg)};
      },
      [](const VectorPairInstance& in) { return reverse_holder_gap(in.x, in.y, in.r); },
      [](const VectorPairInstance& in) {
        return json{{"x", to_vector(in.x)}, {"y", to_vector(in.y)}, {"r", in.r}};
      });

  out.l0_holder = run_kind<L0Instance>(
      "l0_holder", kL0Stream, cfg,
      [&](Rng& rng) {
        const std::size_t n = rng.index(cfg.dim_min, cfg.dim_max);
        auto x = PositiveVector::quantities(random_vector(rng, n, 1e-2, 1e2));
        auto y = PositiveVector::prices(random_vector(rng, n, 1e-2, 1e2));
        return L0Instance{std::move(x), std::move(y), random_weights(rng, n)};
      },
      [](const L0Instance& in) { return l0_holder_gap(in.x, in.y, in.theta); },
      [](const L0Instance& in) {
        return json{{"x", to_vector(in.x)},
                    {"y", to_vector(in.y)},
                    {"theta", std::vector<double>(in.theta.values().begin(), in.theta.values().end())}};
      });

  out.direct_sum = run_kind<DirectSumInstance>(
      "direct_sum", kDirectSumStream, cfg,
      [&](Rng& rng) {
        const std::size_t n = rng.index(cfg.dim_min, cfg.dim_max);
        NestTree tree = random_tree(rng, cfg, n);
        auto x = PositiveVector::quantities(random_vector(rng, n, 1e-2, 1e2));
        auto p = PositiveVector::prices(random_vector(rng, n, 1e-2, 1e2));
        return DirectSumInstance{std::move(tree), std::move(x), std::move(p)};
      },
      [](const DirectSumInstance& in) { return direct_sum_holder_gap(in.tree, in.x, in.p); },
      [](const DirectSumInstance& in) {
        return json{{"tree", json::parse(tree_to_json(in.tree))},
                    {"x", to_vector(in.x)},
                    {"p", to_vector(in.p)}};
      });
  return out;
}

AgreementReport check_oracle_agreement(const OracleConfig& cfg, std::size_t n_instances) {
  cfg.validate();
  const std::size_t dim_max = std::max(cfg.dim_min, std::min<std::size_t>(cfg.dim_max, 6));

  struct Outcome {
    double relative_difference = 0.0;
  };
  auto generate = [&](std::size_t i) {
    Rng rng(cfg.seed, kAgreementStream, i);
    const std::size_t n = rng.index(cfg.dim_min, dim_max);
    NestTree tree = random_tree(rng, cfg, n);
    const double u = rng.uniform(cfg.value_min, cfg.value_max);
    std::vector<double> p(n);
    for (double& v : p) v = rng.uniform(cfg.value_min, cfg.value_max);
    return std::tuple{std::move(tree), u, PositiveVector::prices(std::move(p))};
  };

  std::vector<Outcome> outcomes(n_instances);
  parallel_for(n_instances, thread_count(cfg), [&](std::size_t i) {
    auto [tree, u, p] = generate(i);
    const NodeIndexing indexing = validate_tree(tree, p.size());
    const double closed = expenditure(indexing, u, p);
    OracleConfig local = cfg;
    local.seed = derive_seed(cfg.seed, kAgreementStream, i);
    const double brute = minimize_expenditure_bruteforce(indexing, u, p, local).cost;
    outcomes[i].relative_difference = (brute - closed) / closed;
  });

  AgreementReport report;
  report.n_tested = n_instances;
  if (n_instances == 0) return report;
  std::size_t worst = 0;
  report.min_relative_difference = std::numeric_limits<double>::infinity();
  report.max_relative_difference = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_instances; ++i) {
    const double d = outcomes[i].relative_difference;
    if (d < -kInequalitySlack) ++report.n_undercut;
    if (std::abs(d) > kAgreementTolerance) ++report.n_mismatch;
    report.min_relative_difference = std::min(report.min_relative_difference, d);
    report.max_relative_difference = std::max(report.max_relative_difference, d);
    if (std::abs(d) > std::abs(outcomes[worst].relative_difference)) worst = i;
  }
  auto [tree, u, p] = generate(worst);
  report.worst_case_inputs = json{{"sample_index", worst},
                                  {"seed", cfg.seed},
                                  {"tree", json::parse(tree_to_json(tree))},
                                  {"u", u},
                                  {"p", to_vector(p)},
                                  {"relative_difference", outcomes[worst].relative_difference}}
                                 .dump();
  return report;
}

}  // namespace ces::oracle
