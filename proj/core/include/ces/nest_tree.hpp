#pragma once

// Armington nest trees: recursive aggregators over a partition of goods.
// Quantities aggregate with each node's exponent r, prices with the dual s.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ces/lr_core.hpp"

namespace ces {

/// Depth above which validate_tree records a warning.
inline constexpr std::size_t kDeepTreeWarningDepth = 16;

class NestTree {
 public:
  static NestTree leaf(std::size_t good);

  /// Internal node. Weights are required for Cobb-Douglas, optional for finite r.
  static NestTree node(Exponent aggregator, std::vector<NestTree> children,
                       std::optional<WeightVector> weights = std::nullopt);

  /// Unweighted CES node over the given children.
  static NestTree ces(double r, std::vector<NestTree> children);
  static NestTree cobb_douglas(WeightVector weights, std::vector<NestTree> children);

  /// Unweighted depth-1 tree over goods 0..n-1.
  static NestTree flat(std::size_t n_goods, const Exponent& aggregator);

  bool is_leaf() const noexcept { return !aggregator_.has_value(); }
  std::size_t good() const;
  const Exponent& aggregator() const;
  const std::optional<WeightVector>& weights() const noexcept { return weights_; }
  const std::vector<NestTree>& children() const noexcept { return children_; }

  std::size_t leaf_count() const;

 private:
  NestTree() = default;

  std::size_t good_ = 0;
  std::optional<Exponent> aggregator_;
  std::optional<WeightVector> weights_;
  std::vector<NestTree> children_;
};

struct IndexedNode {
  std::optional<std::size_t> parent;
  std::size_t depth = 0;
  // Leaves under this node occupy [leaf_begin, leaf_end) in pre-order leaf numbering.
  std::size_t leaf_begin = 0;
  std::size_t leaf_end = 0;
  std::optional<std::size_t> good;        // leaves only
  std::optional<Exponent> aggregator;     // internal nodes only
  std::optional<WeightVector> weights;
  std::vector<std::size_t> children;

  bool is_leaf() const noexcept { return good.has_value(); }
};

/// Flattened, validated view of a NestTree. Nodes (leaves included) are
/// numbered in pre-order; index 0 is the root.
class NodeIndexing {
 public:
  std::span<const IndexedNode> nodes() const noexcept { return nodes_; }
  const IndexedNode& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t n_goods() const noexcept { return leaf_goods_.size(); }

  /// Good id of each leaf, in pre-order leaf numbering.
  std::span<const std::size_t> leaf_goods() const noexcept { return leaf_goods_; }

  /// Good ids beneath a node.
  std::span<const std::size_t> goods_under(std::size_t node) const;

  /// Pre-order node index of each good's leaf.
  std::span<const std::size_t> leaf_node_of_good() const noexcept { return leaf_node_of_good_; }

  std::size_t max_depth() const noexcept { return max_depth_; }
  std::span<const std::string> warnings() const noexcept { return warnings_; }

 private:
  friend NodeIndexing validate_tree(const NestTree& tree, std::size_t n_goods);

  std::vector<IndexedNode> nodes_;
  std::vector<std::size_t> leaf_goods_;
  std::vector<std::size_t> leaf_node_of_good_;
  std::size_t max_depth_ = 0;
  std::vector<std::string> warnings_;
};

/// Checks the partition, aggregator domains and weight arities. Throws
/// std::invalid_argument describing the first problem found.
NodeIndexing validate_tree(const NestTree& tree, std::size_t n_goods);

/// Root value plus the value at every pre-order node (leaves hold the input
/// entry of their good).
struct NodeValues {
  double root = 0.0;
  std::vector<double> per_node;
};

/// Exponent a node applies to its children's prices: the dual of its
/// aggregator. Throws std::domain_error for r = 1 and the infinities.
Exponent price_aggregator(const IndexedNode& node);

/// U(x): bottom-up evaluation of every node's (weighted) norm.
NodeValues aggregate_quantity(const NodeIndexing& tree, const PositiveVector& x);
NodeValues aggregate_quantity(const NestTree& tree, const PositiveVector& x);

/// Unit-utility cost: the same recursion under dual exponents. Weighted
/// nodes use ||theta^{1/s} (theta^{-1} P)||_s, Cobb-Douglas nodes
/// ||theta^{-1} P||_{0,theta}.
NodeValues aggregate_price(const NodeIndexing& tree, const PositiveVector& p);
NodeValues aggregate_price(const NestTree& tree, const PositiveVector& p);

/// Same as aggregate_quantity / aggregate_price but every value is a natural
/// log. Stays finite when the aggregates themselves over- or underflow.
NodeValues aggregate_log_quantity(const NodeIndexing& tree, const PositiveVector& x);
NodeValues aggregate_log_price(const NodeIndexing& tree, const PositiveVector& p);

/// x.p - U(x) * aggregate_price(p).
InequalityGapReport direct_sum_holder_gap(const NodeIndexing& tree, const PositiveVector& x,
                                          const PositiveVector& p);
InequalityGapReport direct_sum_holder_gap(const NestTree& tree, const PositiveVector& x,
                                          const PositiveVector& p);

}  // namespace ces
