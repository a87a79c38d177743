#include "ces/nest_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ces {

NestTree NestTree::leaf(std::size_t good) {
  NestTree t;
  t.good_ = good;
  return t;
}

NestTree NestTree::node(Exponent aggregator, std::vector<NestTree> children,
                        std::optional<WeightVector> weights) {
  NestTree t;
  t.aggregator_ = aggregator;
  t.weights_ = std::move(weights);
  t.children_ = std::move(children);
  return t;
}

NestTree NestTree::ces(double r, std::vector<NestTree> children) {
  return node(Exponent::from_value(r), std::move(children));
}

NestTree NestTree::cobb_douglas(WeightVector weights, std::vector<NestTree> children) {
  return node(Exponent::cobb_douglas(), std::move(children), std::move(weights));
}

NestTree NestTree::flat(std::size_t n_goods, const Exponent& aggregator) {
  std::vector<NestTree> leaves;
  leaves.reserve(n_goods);
  for (std::size_t i = 0; i < n_goods; ++i) leaves.push_back(leaf(i));
  std::optional<WeightVector> weights;
  if (aggregator.kind() == ExponentKind::cobb_douglas) weights = WeightVector::uniform(n_goods);
  return node(aggregator, std::move(leaves), std::move(weights));
}

std::size_t NestTree::good() const {
  if (!is_leaf()) throw std::logic_error("good() called on an internal node");
  return good_;
}

const Exponent& NestTree::aggregator() const {
  if (is_leaf()) throw std::logic_error("aggregator() called on a leaf");
  return *aggregator_;
}

std::size_t NestTree::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

std::span<const std::size_t> NodeIndexing::goods_under(std::size_t node) const {
  const auto& n = nodes_.at(node);
  return std::span<const std::size_t>(leaf_goods_).subspan(n.leaf_begin, n.leaf_end - n.leaf_begin);
}

namespace {

struct Indexer {
  std::size_t n_goods;
  std::vector<IndexedNode> nodes;
  std::vector<std::size_t> leaf_goods;
  std::vector<std::size_t> leaf_node_of_good;
  std::size_t max_depth = 0;

  [[noreturn]] static void fail(std::size_t node, const std::string& what) {
    throw std::invalid_argument("nest tree node " + std::to_string(node) + ": " + what);
  }

  std::size_t visit(const NestTree& t, std::optional<std::size_t> parent, std::size_t depth) {
    const std::size_t index = nodes.size();
    nodes.emplace_back();
    nodes[index].parent = parent;
    nodes[index].depth = depth;
    nodes[index].leaf_begin = leaf_goods.size();
    max_depth = std::max(max_depth, depth);

    if (t.is_leaf()) {
      const std::size_t g = t.good();
      if (g >= n_goods) {
        fail(index, "good id " + std::to_string(g) + " out of range for " +
                        std::to_string(n_goods) + " goods");
      }
      if (leaf_node_of_good[g] != kUnseen) fail(index, "good id " + std::to_string(g) + " appears twice");
      leaf_node_of_good[g] = index;
      nodes[index].good = g;
      leaf_goods.push_back(g);
      nodes[index].leaf_end = leaf_goods.size();
      return index;
    }

    const Exponent& e = t.aggregator();
    const auto& weights = t.weights();
    const std::size_t arity = t.children().size();
    if (arity == 0) fail(index, "internal node has no children");
    switch (e.kind()) {
      case ExponentKind::pos_infinity:
        fail(index, "aggregator r = +inf is outside r <= 1");
      case ExponentKind::finite:
        if (e.value() > 1.0) fail(index, "aggregator r = " + e.to_string() + " is outside r <= 1");
        break;
      case ExponentKind::cobb_douglas:
        if (!weights) fail(index, "Cobb-Douglas node requires weights");
        break;
      case ExponentKind::neg_infinity:
        if (weights) fail(index, "weights are not supported on a Leontief node");
        break;
    }
    if (weights && weights->size() != arity) {
      fail(index, "node has " + std::to_string(arity) + " children but " +
                      std::to_string(weights->size()) + " weights");
    }
    nodes[index].aggregator = e;
    nodes[index].weights = weights;

    std::vector<std::size_t> children;
    children.reserve(arity);
    for (const auto& c : t.children()) children.push_back(visit(c, index, depth + 1));
    nodes[index].children = std::move(children);
    nodes[index].leaf_end = leaf_goods.size();
    return index;
  }

  static constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
};

void check_dimension(const NodeIndexing& tree, const PositiveVector& v) {
  if (v.size() != tree.n_goods()) {
    throw std::invalid_argument("vector has " + std::to_string(v.size()) + " entries, tree has " +
                                std::to_string(tree.n_goods()) + " goods");
  }
}

template <class Leaf, class Combine>
NodeValues evaluate_bottom_up(const NodeIndexing& tree, const PositiveVector& v, Leaf leaf,
                              Combine combine) {
  NodeValues out;
  out.per_node.assign(tree.size(), 0.0);
  std::vector<double> child_values;
  for (std::size_t k = tree.size(); k-- > 0;) {
    const IndexedNode& n = tree.nodes()[k];
    if (n.is_leaf()) {
      out.per_node[k] = leaf(v[*n.good]);
      continue;
    }
    if (n.children.size() == 1) {
      // A singleton nest is the identity under every aggregator.
      out.per_node[k] = out.per_node[n.children.front()];
      continue;
    }
    child_values.clear();
    for (std::size_t c : n.children) child_values.push_back(out.per_node[c]);
    out.per_node[k] = combine(n, child_values);
  }
  out.root = out.per_node.front();
  return out;
}

}  // namespace

NodeIndexing validate_tree(const NestTree& tree, std::size_t n_goods) {
  if (tree.is_leaf()) throw std::invalid_argument("nest tree root must be an internal node");
  Indexer ix{n_goods, {}, {}, std::vector<std::size_t>(n_goods, Indexer::kUnseen), 0};
  ix.visit(tree, std::nullopt, 0);
  for (std::size_t g = 0; g < n_goods; ++g) {
    if (ix.leaf_node_of_good[g] == Indexer::kUnseen) {
      throw std::invalid_argument("nest tree: good id " + std::to_string(g) + " has no leaf");
    }
  }
  NodeIndexing out;
  out.nodes_ = std::move(ix.nodes);
  out.leaf_goods_ = std::move(ix.leaf_goods);
  out.leaf_node_of_good_ = std::move(ix.leaf_node_of_good);
  out.max_depth_ = ix.max_depth;
  if (out.max_depth_ > kDeepTreeWarningDepth) {
    out.warnings_.push_back("tree depth " + std::to_string(out.max_depth_) + " exceeds " +
                            std::to_string(kDeepTreeWarningDepth) + "; check the configuration");
  }
  return out;
}

Exponent price_aggregator(const IndexedNode& node) {
  if (node.is_leaf()) throw std::logic_error("price_aggregator called on a leaf");
  return node.aggregator->dual();
}

NodeValues aggregate_quantity(const NodeIndexing& tree, const PositiveVector& x) {
  if (x.role() != VectorRole::quantity) throw std::invalid_argument("aggregate_quantity expects quantities");
  check_dimension(tree, x);
  return evaluate_bottom_up(tree, x, std::identity{}, [](const IndexedNode& n, std::span<const double> values) {
    if (n.weights) return detail::weighted_norm_unchecked(values, n.weights->values(), *n.aggregator);
    return detail::norm_unchecked(values, *n.aggregator);
  });
}

NodeValues aggregate_quantity(const NestTree& tree, const PositiveVector& x) {
  return aggregate_quantity(validate_tree(tree, x.size()), x);
}

NodeValues aggregate_price(const NodeIndexing& tree, const PositiveVector& p) {
  if (p.role() != VectorRole::price) throw std::invalid_argument("aggregate_price expects prices");
  check_dimension(tree, p);
  std::vector<double> deflated;
  return evaluate_bottom_up(tree, p, std::identity{}, [&](const IndexedNode& n, std::span<const double> values) {
    const Exponent s = price_aggregator(n);
    if (!n.weights) return detail::norm_unchecked(values, s);
    const auto theta = n.weights->values();
    deflated.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) deflated[i] = values[i] / theta[i];
    return detail::weighted_norm_unchecked(deflated, theta, s);
  });
}

NodeValues aggregate_price(const NestTree& tree, const PositiveVector& p) {
  return aggregate_price(validate_tree(tree, p.size()), p);
}

NodeValues aggregate_log_quantity(const NodeIndexing& tree, const PositiveVector& x) {
  if (x.role() != VectorRole::quantity) throw std::invalid_argument("aggregate_log_quantity expects quantities");
  check_dimension(tree, x);
  const auto log = [](double v) { return std::log(v); };
  return evaluate_bottom_up(tree, x, log, [](const IndexedNode& n, std::span<const double> logs) {
    if (n.weights) return detail::log_weighted_norm_from_logs(logs, n.weights->values(), *n.aggregator);
    return detail::log_norm_from_logs(logs, *n.aggregator);
  });
}

NodeValues aggregate_log_price(const NodeIndexing& tree, const PositiveVector& p) {
  if (p.role() != VectorRole::price) throw std::invalid_argument("aggregate_log_price expects prices");
  check_dimension(tree, p);
  const auto log = [](double v) { return std::log(v); };
  std::vector<double> deflated;
  return evaluate_bottom_up(tree, p, log, [&](const IndexedNode& n, std::span<const double> logs) {
    const Exponent s = price_aggregator(n);
    if (!n.weights) return detail::log_norm_from_logs(logs, s);
    const auto theta = n.weights->values();
    deflated.resize(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) deflated[i] = logs[i] - std::log(theta[i]);
    return detail::log_weighted_norm_from_logs(deflated, theta, s);
  });
}

InequalityGapReport direct_sum_holder_gap(const NodeIndexing& tree, const PositiveVector& x,
                                          const PositiveVector& p) {
  // U(x) and P(p) can each leave the double range on near-zero exponents; their product cannot.
  const double log_rhs = aggregate_log_quantity(tree, x).root + aggregate_log_price(tree, p).root;
  return InequalityGapReport::from(dot(x.values(), p.values()), std::exp(log_rhs));
}

InequalityGapReport direct_sum_holder_gap(const NestTree& tree, const PositiveVector& x,
                                          const PositiveVector& p) {
  return direct_sum_holder_gap(validate_tree(tree, x.size()), x, p);
}

}  // namespace ces
