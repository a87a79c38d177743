#include "ces/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ces {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string(what) + " must be a positive finite number");
  }
}

// Share of the parent's budget that each child receives, given the
// children's log aggregate prices. Computed as a softmax so large |s| and
// out-of-range aggregates cannot overflow.
void child_shares(const IndexedNode& n, std::span<const double> log_prices, std::vector<double>& out) {
  const std::size_t k = n.children.size();
  out.assign(k, 0.0);
  if (k == 1) {
    out[0] = 1.0;
    return;
  }
  const Exponent& e = *n.aggregator;
  if (e.kind() == ExponentKind::cobb_douglas) {
    for (std::size_t i = 0; i < k; ++i) out[i] = (*n.weights)[i];
    return;
  }
  const double s = price_aggregator(n).value();
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    const double log_p = log_prices[n.children[i]];
    if (n.weights) {
      const double log_theta = std::log((*n.weights)[i]);
      out[i] = log_theta + s * (log_p - log_theta);
    } else {
      out[i] = s * log_p;
    }
    top = std::max(top, out[i]);
  }
  double total = 0.0;
  for (double& w : out) {
    w = std::exp(w - top);
    total += w;
  }
  for (double& w : out) w /= total;
}

struct ShareCascade {
  std::vector<double> node_shares;       // conditional on parent
  std::vector<double> cumulative_shares; // share of the root budget
  NodeValues prices;
  NodeValues log_prices;
};

ShareCascade cascade(const NodeIndexing& tree, const PositiveVector& p) {
  require_closed_form(tree);
  ShareCascade out;
  out.prices = aggregate_price(tree, p);
  out.log_prices = aggregate_log_price(tree, p);
  out.node_shares.assign(tree.size(), 0.0);
  out.cumulative_shares.assign(tree.size(), 0.0);
  out.node_shares[0] = 1.0;
  out.cumulative_shares[0] = 1.0;
  std::vector<double> shares;
  // Pre-order guarantees a parent is finished before its children.
  for (std::size_t k = 0; k < tree.size(); ++k) {
    const IndexedNode& n = tree.nodes()[k];
    if (n.is_leaf()) continue;
    child_shares(n, out.log_prices.per_node, shares);
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      const std::size_t c = n.children[i];
      out.node_shares[c] = shares[i];
      out.cumulative_shares[c] = out.cumulative_shares[k] * shares[i];
    }
  }
  return out;
}

}  // namespace

void require_closed_form(const NodeIndexing& tree) {
  for (std::size_t k = 0; k < tree.size(); ++k) {
    const IndexedNode& n = tree.nodes()[k];
    if (n.is_leaf() || n.children.size() == 1) continue;
    if (!n.aggregator->has_dual()) {
      throw std::domain_error("node " + std::to_string(k) + ": aggregator r = " +
                              n.aggregator->to_string() +
                              " has no closed-form demand (requires r < 1 or Cobb-Douglas)");
    }
  }
}

double expenditure(const NodeIndexing& tree, double u, const PositiveVector& p) {
  require_positive(u, "utility");
  require_closed_form(tree);
  return u * aggregate_price(tree, p).root;
}

double indirect_utility(const NodeIndexing& tree, double m, const PositiveVector& p) {
  require_positive(m, "income");
  require_closed_form(tree);
  return m / aggregate_price(tree, p).root;
}

DemandReport marshallian_demand(const NodeIndexing& tree, double m, const PositiveVector& p) {
  require_positive(m, "income");
  ShareCascade c = cascade(tree, p);

  std::vector<double> quantities(tree.n_goods());
  std::vector<double> leaf_shares(tree.n_goods());
  for (std::size_t g = 0; g < tree.n_goods(); ++g) {
    const std::size_t leaf = tree.leaf_node_of_good()[g];
    leaf_shares[g] = c.cumulative_shares[leaf];
    quantities[g] = m * leaf_shares[g] / p[g];
  }

  DemandReport out{PositiveVector::quantities(std::move(quantities)), {}, {}, {}, {}, m, 0.0};
  out.node_budget_shares = std::move(c.node_shares);
  out.leaf_budget_shares = std::move(leaf_shares);
  out.node_quantities = aggregate_quantity(tree, out.quantities).per_node;
  out.utility = std::exp(std::log(m) - c.log_prices.root);
  out.price_index_per_node = std::move(c.prices.per_node);
  return out;
}

DemandReport hicksian_demand(const NodeIndexing& tree, double u, const PositiveVector& p) {
  const double e = expenditure(tree, u, p);
  DemandReport out = marshallian_demand(tree, e, p);
  out.utility = u;
  return out;
}

BudgetShares budget_shares(const NodeIndexing& tree, const PositiveVector& p) {
  ShareCascade c = cascade(tree, p);
  BudgetShares out;
  out.leaf_shares.resize(tree.n_goods());
  for (std::size_t g = 0; g < tree.n_goods(); ++g) {
    out.leaf_shares[g] = c.cumulative_shares[tree.leaf_node_of_good()[g]];
  }
  out.node_shares = std::move(c.node_shares);
  return out;
}

PriceIndexResult konus_index(const NodeIndexing& tree, const PositiveVector& p_new,
                             const PositiveVector& p_old) {
  require_closed_form(tree);
  PriceIndexResult out;
  out.numerator_cost = aggregate_price(tree, p_new).root;
  out.denominator_cost = aggregate_price(tree, p_old).root;
  out.index = std::exp(aggregate_log_price(tree, p_new).root - aggregate_log_price(tree, p_old).root);
  return out;
}

double expenditure(const NestTree& tree, double u, const PositiveVector& p) {
  return expenditure(validate_tree(tree, p.size()), u, p);
}
DemandReport hicksian_demand(const NestTree& tree, double u, const PositiveVector& p) {
  return hicksian_demand(validate_tree(tree, p.size()), u, p);
}
double indirect_utility(const NestTree& tree, double m, const PositiveVector& p) {
  return indirect_utility(validate_tree(tree, p.size()), m, p);
}
DemandReport marshallian_demand(const NestTree& tree, double m, const PositiveVector& p) {
  return marshallian_demand(validate_tree(tree, p.size()), m, p);
}
BudgetShares budget_shares(const NestTree& tree, const PositiveVector& p) {
  return budget_shares(validate_tree(tree, p.size()), p);
}
PriceIndexResult konus_index(const NestTree& tree, const PositiveVector& p_new,
                             const PositiveVector& p_old) {
  if (p_new.size() != p_old.size()) throw std::invalid_argument("konus_index: dimension mismatch");
  return konus_index(validate_tree(tree, p_new.size()), p_new, p_old);
}

}  // namespace ces
