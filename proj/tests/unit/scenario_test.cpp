#include <gtest/gtest.h>

#include <string>

#include "ces/demand.hpp"
#include "ces/oracle.hpp"
#include "ces/scenario.hpp"
#include "json.hpp"

using namespace ces;
using nlohmann::json;

namespace {

json base_doc() {
  return json::parse(R"({
    "goods": [{"id": "home", "name": "Domestic"}, {"id": "import", "name": "Imported"}],
    "tree": {"aggregator": "ces", "r": 0.5, "children": [{"good": "home"}, {"good": "import"}]},
    "scenarios": [{"name": "base", "prices": {"home": 1, "import": 4}, "utility": 1, "income": 0.8}]
  })");
}

std::string field_of(const json& doc) {
  try {
    parse_scenario_file(doc.dump());
  } catch (const ScenarioError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(ScenarioFile, ParsesWorkedInstance) {
  const auto f = parse_scenario_file(base_doc().dump());
  ASSERT_EQ(f.goods.size(), 2u);
  EXPECT_EQ(f.goods[1].name, "Imported");
  const auto& s = f.scenario("base");
  EXPECT_DOUBLE_EQ(s.prices[1], 4.0);
  EXPECT_DOUBLE_EQ(*s.utility, 1.0);
  EXPECT_DOUBLE_EQ(*s.income, 0.8);
  EXPECT_NEAR(expenditure(f.indexing, *s.utility, f.prices(s)), 0.8, 1e-15);
  EXPECT_THROW(f.scenario("missing"), ScenarioError);
}

TEST(ScenarioFile, ExponentSpellings) {
  json doc = base_doc();
  doc["tree"]["r"] = "-inf";
  EXPECT_EQ(parse_scenario_file(doc.dump()).tree.aggregator().kind(), ExponentKind::neg_infinity);
  doc["tree"] = json::parse(R"({"aggregator": "cobb_douglas", "weights": [0.3, 0.7],
                                "children": [{"good": "home"}, {"good": "import"}]})");
  EXPECT_EQ(parse_scenario_file(doc.dump()).tree.aggregator().kind(), ExponentKind::cobb_douglas);
}

TEST(ScenarioFile, FieldDiagnostics) {
  json doc = base_doc();
  doc.erase("goods");
  EXPECT_EQ(field_of(doc), "");

  doc = base_doc();
  doc["tree"]["r"] = 0;
  EXPECT_EQ(field_of(doc), "/tree/r");

  doc = base_doc();
  doc["tree"]["r"] = "sideways";
  EXPECT_EQ(field_of(doc), "/tree/r");

  doc = base_doc();
  doc["tree"]["aggregator"] = "translog";
  EXPECT_EQ(field_of(doc), "/tree/aggregator");

  doc = base_doc();
  doc["tree"]["children"][1]["good"] = "export";
  EXPECT_EQ(field_of(doc), "/tree/children/1/good");

  doc = base_doc();
  doc["tree"]["children"][1]["good"] = "home";
  EXPECT_EQ(field_of(doc), "/tree");

  doc = base_doc();
  doc["tree"]["r"] = 1.5;
  EXPECT_EQ(field_of(doc), "/tree");

  doc = base_doc();
  doc["tree"]["weights"] = {0.5, 0.6};
  EXPECT_EQ(field_of(doc), "/tree/weights");

  doc = base_doc();
  doc["scenarios"][0]["prices"].erase("import");
  EXPECT_EQ(field_of(doc), "/scenarios/0/prices");

  doc = base_doc();
  doc["scenarios"][0]["prices"]["import"] = -4;
  EXPECT_EQ(field_of(doc), "/scenarios/0/prices/import");

  doc = base_doc();
  doc["scenarios"][0]["income"] = "lots";
  EXPECT_EQ(field_of(doc), "/scenarios/0/income");

  doc = base_doc();
  doc["goods"][1]["id"] = "home";
  EXPECT_EQ(field_of(doc), "/goods/1/id");

  doc = base_doc();
  doc["scenarios"].push_back(doc["scenarios"][0]);
  EXPECT_EQ(field_of(doc), "/scenarios/1/name");
}

TEST(ScenarioFile, MalformedJsonReportsLocation) {
  try {
    parse_scenario_file("{\n  \"goods\": [\n    {\"id\": \"a\",}\n  ]\n}");
    FAIL() << "expected a parse error";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ScenarioFile, MissingFile) {
  EXPECT_THROW(load_scenario_file("/nonexistent/scenario.json"), ScenarioError);
}

namespace {

// Weights are renormalized on construction, which can move them by an ulp.
void expect_same_tree(const json& a, const json& b) {
  ASSERT_EQ(a.contains("good"), b.contains("good"));
  if (a.contains("good")) {
    EXPECT_EQ(a["good"], b["good"]);
    return;
  }
  EXPECT_EQ(a["aggregator"], b["aggregator"]);
  EXPECT_EQ(a.value("r", json()), b.value("r", json()));
  ASSERT_EQ(a.contains("weights"), b.contains("weights"));
  if (a.contains("weights")) {
    ASSERT_EQ(a["weights"].size(), b["weights"].size());
    for (std::size_t k = 0; k < a["weights"].size(); ++k)
      EXPECT_NEAR(a["weights"][k].get<double>(), b["weights"][k].get<double>(), 1e-15);
  }
  ASSERT_EQ(a["children"].size(), b["children"].size());
  for (std::size_t k = 0; k < a["children"].size(); ++k) expect_same_tree(a["children"][k], b["children"][k]);
}

}  // namespace

TEST(TreeJson, RoundTripsRandomTrees) {
  oracle::OracleConfig cfg;
  for (std::uint64_t i = 0; i < 200; ++i) {
    oracle::Rng rng(cfg.seed, 50, i);
    const std::size_t n = rng.index(2, 8);
    const NestTree tree = oracle::random_tree(rng, cfg, n);
    json doc;
    doc["goods"] = json::array();
    for (std::size_t g = 0; g < n; ++g) doc["goods"].push_back({{"id", std::to_string(g)}});
    doc["tree"] = json::parse(tree_to_json(tree));
    const auto parsed = parse_scenario_file(doc.dump());
    expect_same_tree(json::parse(tree_to_json(parsed.tree)), json::parse(tree_to_json(tree)));

    std::vector<double> p(n);
    for (double& v : p) v = rng.log_uniform(0.5, 2.0);
    const double want = aggregate_price(validate_tree(tree, n), PositiveVector::prices(p)).root;
    EXPECT_NEAR(aggregate_price(parsed.indexing, PositiveVector::prices(p)).root / want, 1.0, 1e-14);
  }
}
