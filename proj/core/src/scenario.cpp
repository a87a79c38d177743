#include "ces/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace ces {

using nlohmann::json;

ScenarioError::ScenarioError(std::string field, const std::string& what)
    : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

namespace {

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(path, std::string("missing required field \"") + key + "\"");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "expected a number");
  return j.get<double>();
}

double as_positive(const json& j, const std::string& path) {
  const double v = as_number(j, path);
  if (!(v > 0.0) || !std::isfinite(v)) throw ScenarioError(path, "expected a positive number");
  return v;
}

std::string as_id(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ScenarioError(path, "expected a string or integer id");
}

double parse_r(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-inf" || s == "-infinity") return -INFINITY;
    if (s == "inf" || s == "infinity" || s == "+inf") return INFINITY;
    throw ScenarioError(path, "unrecognized exponent \"" + s + "\"");
  }
  return as_number(j, path);
}

struct TreeParser {
  const std::unordered_map<std::string, std::size_t>& good_index;

  NestTree parse(const json& j, const std::string& path) const {
    if (!j.is_object()) throw ScenarioError(path, "expected a tree node object");
    if (j.contains("good")) {
      const std::string id = as_id(j["good"], path + "/good");
      auto it = good_index.find(id);
      if (it == good_index.end()) throw ScenarioError(path + "/good", "undeclared good \"" + id + "\"");
      return NestTree::leaf(it->second);
    }
    const json& agg = require(j, path, "aggregator");
    if (!agg.is_string()) throw ScenarioError(path + "/aggregator", "expected a string");
    const std::string kind = agg.get<std::string>();

    std::optional<WeightVector> weights;
    if (j.contains("weights")) {
      const json& w = j["weights"];
      if (!w.is_array()) throw ScenarioError(path + "/weights", "expected an array");
      std::vector<double> theta;
      for (std::size_t i = 0; i < w.size(); ++i) {
        theta.push_back(as_positive(w[i], path + "/weights/" + std::to_string(i)));
      }
      try {
        weights.emplace(std::move(theta));
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(path + "/weights", e.what());
      }
    }

    Exponent exponent = Exponent::cobb_douglas();
    if (kind == "ces") {
      const double r = parse_r(require(j, path, "r"), path + "/r");
      if (r == 0.0) throw ScenarioError(path + "/r", "r = 0 is Cobb-Douglas; use aggregator \"cobb_douglas\"");
      exponent = Exponent::from_value(r);
    } else if (kind != "cobb_douglas") {
      throw ScenarioError(path + "/aggregator", "unknown aggregator \"" + kind + "\"");
    }

    const json& kids = require(j, path, "children");
    if (!kids.is_array() || kids.empty()) throw ScenarioError(path + "/children", "expected a nonempty array");
    std::vector<NestTree> children;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      children.push_back(parse(kids[i], path + "/children/" + std::to_string(i)));
    }
    return NestTree::node(exponent, std::move(children), std::move(weights));
  }
};

json r_to_json(const Exponent& e) {
  switch (e.kind()) {
    case ExponentKind::neg_infinity: return "-inf";
    case ExponentKind::pos_infinity: return "inf";
    default: return e.value();
  }
}

json tree_json(const NestTree& t, const std::vector<std::string>* ids) {
  if (t.is_leaf()) {
    if (ids) return json{{"good", ids->at(t.good())}};
    return json{{"good", t.good()}};
  }
  json out;
  if (t.aggregator().kind() == ExponentKind::cobb_douglas) {
    out["aggregator"] = "cobb_douglas";
  } else {
    out["aggregator"] = "ces";
    out["r"] = r_to_json(t.aggregator());
  }
  if (t.weights()) {
    out["weights"] = std::vector<double>(t.weights()->values().begin(), t.weights()->values().end());
  }
  out["children"] = json::array();
  for (const auto& c : t.children()) out["children"].push_back(tree_json(c, ids));
  return out;
}

std::vector<double> parse_good_map(const json& j, const std::string& path,
                                   const std::vector<Good>& goods,
                                   const std::unordered_map<std::string, std::size_t>& good_index) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object keyed by good id");
  std::vector<double> out(goods.size(), 0.0);
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto g = good_index.find(it.key());
    if (g == good_index.end()) throw ScenarioError(path + "/" + it.key(), "undeclared good");
    out[g->second] = as_positive(it.value(), path + "/" + it.key());
  }
  for (std::size_t i = 0; i < goods.size(); ++i) {
    if (out[i] == 0.0) throw ScenarioError(path, "missing value for good \"" + goods[i].id + "\"");
  }
  return out;
}

}  // namespace

const Scenario& ScenarioFile::scenario(std::string_view name) const {
  for (const auto& s : scenarios) {
    if (s.name == name) return s;
  }
  throw ScenarioError("/scenarios", "no scenario named \"" + std::string(name) + "\"");
}

ScenarioFile parse_scenario_file(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", e.what());
  }
  if (!doc.is_object()) throw ScenarioError("", "top level must be an object");

  const json& goods_json = require(doc, "", "goods");
  if (!goods_json.is_array() || goods_json.empty()) throw ScenarioError("/goods", "expected a nonempty array");
  std::vector<Good> goods;
  std::unordered_map<std::string, std::size_t> good_index;
  for (std::size_t i = 0; i < goods_json.size(); ++i) {
    const std::string path = "/goods/" + std::to_string(i);
    Good g;
    g.id = as_id(require(goods_json[i], path, "id"), path + "/id");
    if (goods_json[i].contains("name")) {
      if (!goods_json[i]["name"].is_string()) throw ScenarioError(path + "/name", "expected a string");
      g.name = goods_json[i]["name"].get<std::string>();
    }
    if (!good_index.emplace(g.id, i).second) throw ScenarioError(path + "/id", "duplicate good id \"" + g.id + "\"");
    goods.push_back(std::move(g));
  }

  NestTree tree = TreeParser{good_index}.parse(require(doc, "", "tree"), "/tree");
  std::optional<NodeIndexing> indexing;
  try {
    indexing.emplace(validate_tree(tree, goods.size()));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("/tree", e.what());
  }

  std::vector<Scenario> scenarios;
  if (doc.contains("scenarios")) {
    const json& sj = doc["scenarios"];
    if (!sj.is_array()) throw ScenarioError("/scenarios", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < sj.size(); ++i) {
      const std::string path = "/scenarios/" + std::to_string(i);
      Scenario s;
      const json& name = require(sj[i], path, "name");
      if (!name.is_string()) throw ScenarioError(path + "/name", "expected a string");
      s.name = name.get<std::string>();
      if (!names.insert(s.name).second) throw ScenarioError(path + "/name", "duplicate scenario name");
      s.prices = parse_good_map(require(sj[i], path, "prices"), path + "/prices", goods, good_index);
      if (sj[i].contains("income")) s.income = as_positive(sj[i]["income"], path + "/income");
      if (sj[i].contains("utility")) s.utility = as_positive(sj[i]["utility"], path + "/utility");
      if (sj[i].contains("quantities")) {
        s.quantities = parse_good_map(sj[i]["quantities"], path + "/quantities", goods, good_index);
      }
      scenarios.push_back(std::move(s));
    }
  }
  return ScenarioFile{std::move(goods), std::move(tree), std::move(*indexing), std::move(scenarios)};
}

ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_file(buf.str());
}

std::string tree_to_json(const NestTree& tree, const std::vector<std::string>& good_ids) {
  return tree_json(tree, &good_ids).dump();
}

std::string tree_to_json(const NestTree& tree) { return tree_json(tree, nullptr).dump(); }

}  // namespace ces
