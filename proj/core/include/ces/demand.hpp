#pragma once

// Closed-form demand on nest trees. Everything is derived from the
// unit-utility cost P(p) = aggregate_price(tree, p):
//
//   e(u, p)  = u P(p)                 nu(m, p) = m / P(p)
//
// Marshallian demand cascades the budget down the tree: a CES node with dual
// s hands child i the share P_i^s / ||P||_s^s (theta_i (P_i/theta_i)^s / sum
// when weighted), a Cobb-Douglas node hands out theta_i, and a leaf spends
// its budget b on b / p_i units. Hicksian demand is the Marshallian bundle
// at income e(u, p).

#include <vector>

#include "ces/lr_core.hpp"
#include "ces/nest_tree.hpp"

namespace ces {

struct DemandReport {
  PositiveVector quantities;                 // per good id
  std::vector<double> node_budget_shares;    // per pre-order node, share of the parent's budget
  std::vector<double> leaf_budget_shares;    // per good id, share of total budget
  std::vector<double> node_quantities;       // aggregate quantity X at every node
  std::vector<double> price_index_per_node;  // aggregate price P at every node
  double expenditure = 0.0;
  double utility = 0.0;
};

struct BudgetShares {
  std::vector<double> node_shares;  // per pre-order node, share of the parent's budget (root: 1)
  std::vector<double> leaf_shares;  // per good id
};

struct PriceIndexResult {
  double index = 0.0;
  double numerator_cost = 0.0;
  double denominator_cost = 0.0;
};

/// Throws std::domain_error unless every non-singleton node has r < 1 or is
/// Cobb-Douglas.
void require_closed_form(const NodeIndexing& tree);

double expenditure(const NodeIndexing& tree, double u, const PositiveVector& p);
DemandReport hicksian_demand(const NodeIndexing& tree, double u, const PositiveVector& p);
double indirect_utility(const NodeIndexing& tree, double m, const PositiveVector& p);
DemandReport marshallian_demand(const NodeIndexing& tree, double m, const PositiveVector& p);
BudgetShares budget_shares(const NodeIndexing& tree, const PositiveVector& p);

/// Konüs cost-of-living index e(u, p_new) / e(u, p_old); independent of u.
PriceIndexResult konus_index(const NodeIndexing& tree, const PositiveVector& p_new,
                             const PositiveVector& p_old);

// Convenience overloads that validate the tree against the price dimension.
double expenditure(const NestTree& tree, double u, const PositiveVector& p);
DemandReport hicksian_demand(const NestTree& tree, double u, const PositiveVector& p);
double indirect_utility(const NestTree& tree, double m, const PositiveVector& p);
DemandReport marshallian_demand(const NestTree& tree, double m, const PositiveVector& p);
BudgetShares budget_shares(const NestTree& tree, const PositiveVector& p);
PriceIndexResult konus_index(const NestTree& tree, const PositiveVector& p_new,
                             const PositiveVector& p_old);

}  // namespace ces
