#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ces/oracle.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "json_writer.hpp"

using nlohmann::json;

namespace {

const std::string kData = CES_TEST_DATA_DIR;
const std::string kGolden = CES_GOLDEN_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ces::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string data_path(const std::string& name) { return kData + "/" + name; }

struct GoldenCase {
  std::string name;
  std::vector<std::string> args;
  std::string extension;
};

std::vector<GoldenCase> golden_cases() {
  std::vector<GoldenCase> out;
  std::ifstream in(kGolden + "/cases.txt");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto bar = line.find('|');
    GoldenCase c;
    std::istringstream name(line.substr(0, bar));
    name >> c.name;
    std::istringstream words(line.substr(bar + 1));
    for (std::string w; words >> w;) {
      // Config paths in the case list are relative to the data directory.
      if (!c.args.empty() && c.args.back() == "--config") w = data_path(w);
      c.args.push_back(w);
    }
    c.extension = c.args.front() == "ball" ? ".csv" : ".json";
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TEST(Cli, GoldenFiles) {
  const auto cases = golden_cases();
  ASSERT_FALSE(cases.empty());
  for (const auto& c : cases) {
    const Outcome r = run(c.args);
    EXPECT_EQ(r.code, 0) << c.name << ": " << r.err;
    EXPECT_EQ(r.out, read_file(kGolden + "/" + c.name + c.extension)) << c.name;
  }
}

TEST(Cli, WorkedInstanceValues) {
  const auto e = json::parse(run({"expenditure", "--config", data_path("flat.json"), "--scenario", "base"}).out);
  EXPECT_DOUBLE_EQ(e["results"][0]["expenditure"].get<double>(), 0.8);
  EXPECT_TRUE(e.contains("timestamp"));
  const auto k = json::parse(run({"index", "--config", data_path("flat.json"), "--from", "base", "--to", "doubled"}).out);
  EXPECT_DOUBLE_EQ(k["results"][0]["index"].get<double>(), 2.0);
}

TEST(Cli, DeterministicOutputIsStable) {
  const std::vector<std::string> args{"hicksian", "--config", data_path("nested.json"), "--deterministic"};
  const Outcome a = run(args), b = run(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(json::parse(a.out).contains("timestamp"));
}

TEST(Cli, OverridesUtilityAndIncome) {
  const auto e = json::parse(
      run({"expenditure", "--config", data_path("flat.json"), "--scenario", "base", "--utility", "3", "--deterministic"}).out);
  EXPECT_NEAR(e["results"][0]["expenditure"].get<double>(), 2.4, 1e-15);
  const auto m = json::parse(
      run({"marshallian", "--config", data_path("flat.json"), "--scenario", "base", "--income", "1.6"}).out);
  EXPECT_NEAR(m["results"][0]["quantities"]["home"].get<double>(), 1.28, 1e-15);
}

TEST(Cli, ValidationErrorsExitOne) {
  EXPECT_EQ(run({}).code, ces::cli::kExitValidation);
  EXPECT_EQ(run({"expenditure"}).code, ces::cli::kExitValidation);
  EXPECT_EQ(run({"expenditure", "--config", data_path("missing.json")}).code, ces::cli::kExitValidation);
  const Outcome unknown = run({"expenditure", "--config", data_path("flat.json"), "--scenario", "nope"});
  EXPECT_EQ(unknown.code, ces::cli::kExitValidation);
  EXPECT_NE(unknown.err.find("nope"), std::string::npos);
  const Outcome no_quantities = run({"norm", "--config", data_path("flat.json")});
  EXPECT_EQ(no_quantities.code, ces::cli::kExitValidation);
  EXPECT_EQ(run({"ball", "--r", "0.5", "--n", "1"}).code, ces::cli::kExitValidation);
  EXPECT_EQ(run({"ball", "--r", "cobb_douglas", "--theta", "0.5"}).code, ces::cli::kExitValidation);
  EXPECT_EQ(run({"ball", "--r", "banana"}).code, ces::cli::kExitValidation);
}

TEST(Cli, MalformedConfigReportsField) {
  const std::string path = ::testing::TempDir() + "/bad_scenario.json";
  {
    std::ofstream f(path);
    f << R"({"goods": [{"id": "a"}, {"id": "b"}],
             "tree": {"aggregator": "ces", "r": 0.5, "children": [{"good": "a"}, {"good": "b"}]},
             "scenarios": [{"name": "s", "prices": {"a": 1, "b": -2}, "utility": 1}]})";
  }
  const Outcome r = run({"expenditure", "--config", path});
  EXPECT_EQ(r.code, ces::cli::kExitValidation);
  EXPECT_NE(r.err.find("/scenarios/0/prices/b"), std::string::npos) << r.err;

  {
    std::ofstream f(path);
    f << "{\n  \"goods\": [\n    {\"id\": \"a\",}\n  ]\n}\n";
  }
  const Outcome syntax = run({"expenditure", "--config", path});
  EXPECT_EQ(syntax.code, ces::cli::kExitValidation);
  EXPECT_NE(syntax.err.find("line 3"), std::string::npos) << syntax.err;
}

TEST(Cli, MissingUtilityIsAValidationError) {
  const std::string path = ::testing::TempDir() + "/no_utility.json";
  {
    std::ofstream f(path);
    f << R"({"goods": [{"id": "a"}, {"id": "b"}],
             "tree": {"aggregator": "ces", "r": 0.5, "children": [{"good": "a"}, {"good": "b"}]},
             "scenarios": [{"name": "s", "prices": {"a": 1, "b": 2}}]})";
  }
  EXPECT_EQ(run({"hicksian", "--config", path}).code, ces::cli::kExitValidation);
  EXPECT_EQ(run({"marshallian", "--config", path}).code, ces::cli::kExitValidation);
  EXPECT_EQ(run({"shares", "--config", path, "--deterministic"}).code, ces::cli::kExitOk);
}

TEST(Cli, VerifyPassesAndReports) {
  const Outcome r = run({"verify", "--seed", "42", "--samples", "500", "--oracle-samples", "20", "--deterministic"});
  ASSERT_EQ(r.code, ces::cli::kExitOk) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["n_violations"].get<int>(), 0);
  EXPECT_EQ(doc["inequalities"].size(), 4u);
  EXPECT_EQ(doc["oracle_agreement"]["n_tested"].get<int>(), 20);
  const Outcome again = run({"verify", "--seed", "42", "--samples", "500", "--oracle-samples", "20", "--deterministic",
                         "--threads", "2"});
  EXPECT_EQ(again.out, r.out);
}

TEST(Cli, BallAtExplicitPoints) {
  const Outcome r = run({"ball", "--r", "1", "--at", "0.25,0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "x1,x2,r\n0.25,0.75,1\n0.5,0.5,1\n");
  const Outcome cd = run({"ball", "--r", "cd", "--theta", "0.5,0.5", "--at", "4"});
  EXPECT_EQ(cd.out, "x1,x2,r\n4,0.25,0\n");
  EXPECT_EQ(run({"ball", "--r", "cobb_douglas", "--at", "1"}).out, "x1,x2,r\n1,1,0\n");
  const Outcome half = run({"ball", "--r", "0.5", "--at", "0.25"});
  EXPECT_EQ(half.out, "x1,x2,r\n0.25,0.25,0.5\n");
}

TEST(Cli, ThreadsFromEnvironment) {
  ::setenv("CES_DEMAND_THREADS", "3", 1);
  EXPECT_EQ(ces::cli::threads_from_environment(), 3u);
  ::setenv("CES_DEMAND_THREADS", "zero", 1);
  EXPECT_EQ(ces::cli::threads_from_environment(), 0u);
  ::unsetenv("CES_DEMAND_THREADS");
  EXPECT_EQ(ces::cli::threads_from_environment(), 0u);
}

TEST(JsonWriter, RoundTripsDoublesAt17Digits) {
  ces::oracle::Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double v = rng.log_uniform(1e-300, 1e300) * (i % 2 ? -1.0 : 1.0);
    EXPECT_EQ(std::stod(ces::cli::format_double(v)), v);
    ces::cli::Document doc;
    doc["v"] = v;
    std::ostringstream out;
    ces::cli::write_json(out, doc);
    EXPECT_EQ(json::parse(out.str())["v"].get<double>(), v);
  }
  ces::cli::Document doc;
  doc["nan"] = std::nan("");
  std::ostringstream out;
  ces::cli::write_json(out, doc);
  EXPECT_TRUE(json::parse(out.str())["nan"].is_null());
}
