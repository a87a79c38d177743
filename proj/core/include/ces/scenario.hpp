#pragma once

// Scenario files: a JSON document declaring goods, a nest tree over them
// and named price scenarios.
//
//   {
//     "goods": [{"id": "a", "name": "Apples"}, ...],
//     "tree": {"aggregator": "ces", "r": 0.5, "children": [{"good": "a"}, ...]},
//     "scenarios": [{"name": "base", "prices": {"a": 1.0}, "utility": 1.0}]
//   }
//
// Aggregators are "ces" (with "r", optional "weights"; r may be "-inf") or
// "cobb_douglas" (with "weights"). Scenarios may also carry "income" and a
// "quantities" map for evaluating U(x).

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ces/lr_core.hpp"
#include "ces/nest_tree.hpp"

namespace ces {

/// Malformed or inconsistent scenario file. field() is a JSON-pointer-like
/// path to the offending value ("" for document-level problems).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& what);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Good {
  std::string id;
  std::string name;
};

struct Scenario {
  std::string name;
  std::vector<double> prices;  // indexed like ScenarioFile::goods
  std::optional<double> income;
  std::optional<double> utility;
  std::optional<std::vector<double>> quantities;
};

struct ScenarioFile {
  std::vector<Good> goods;
  NestTree tree;
  NodeIndexing indexing;
  std::vector<Scenario> scenarios;

  /// Throws ScenarioError if no scenario has this name.
  const Scenario& scenario(std::string_view name) const;

  PositiveVector prices(const Scenario& s) const { return PositiveVector::prices(s.prices); }
};

/// Parses and validates a scenario document. Every scenario must price every
/// good; the tree must partition the declared goods.
ScenarioFile parse_scenario_file(std::string_view json_text);
ScenarioFile load_scenario_file(const std::string& path);

/// Serializes a tree in the scenario-file schema. Leaves are written as
/// {"good": good_ids[i]}.
std::string tree_to_json(const NestTree& tree, const std::vector<std::string>& good_ids);

/// Same, with leaves named by their integer good id.
std::string tree_to_json(const NestTree& tree);

}  // namespace ces
