#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ces/demand.hpp"
#include "ces/level_set.hpp"
#include "ces/nest_tree.hpp"
#include "ces/oracle.hpp"
#include "ces/scenario.hpp"
#include "json_writer.hpp"

namespace ces::cli {

namespace {

/// Usage problems detected after CLI11 parsing (missing scenario fields etc).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string scenario;
  std::string from;
  std::string to;
  std::optional<double> utility;
  std::optional<double> income;
  bool deterministic = false;

  std::uint64_t seed = 42;
  std::size_t samples = 10000;
  std::size_t oracle_samples = 200;
  unsigned threads = 0;

  std::string ball_r;
  std::vector<double> ball_theta;
  std::size_t ball_n = 101;
  std::vector<double> ball_at;
};

struct LoadedConfig {
  ScenarioFile file;
  std::string digest;
};

std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

LoadedConfig load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return LoadedConfig{parse_scenario_file(text), fnv1a64(text)};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Document header(const std::string& command, const Options& opt, const std::string& digest) {
  Document doc;
  doc["tool"] = kToolName;
  doc["version"] = kToolVersion;
  doc["command"] = command;
  if (!digest.empty()) doc["input_digest"] = digest;
  if (!opt.deterministic) doc["timestamp"] = utc_timestamp();
  return doc;
}

std::vector<const Scenario*> selected(const ScenarioFile& file, const Options& opt) {
  std::vector<const Scenario*> out;
  if (!opt.scenario.empty()) {
    out.push_back(&file.scenario(opt.scenario));
    return out;
  }
  for (const auto& s : file.scenarios) out.push_back(&s);
  if (out.empty()) throw UsageError("config declares no scenarios");
  return out;
}

Document by_good(const ScenarioFile& file, std::span<const double> values) {
  Document out = Document::object();
  for (std::size_t i = 0; i < file.goods.size(); ++i) out[file.goods[i].id] = values[i];
  return out;
}

Document node_table(const ScenarioFile& file, std::span<const double> values) {
  Document out = Document::array();
  for (std::size_t k = 0; k < file.indexing.size(); ++k) {
    const IndexedNode& n = file.indexing.node(k);
    Document row;
    row["node"] = k;
    row["depth"] = n.depth;
    if (n.is_leaf()) {
      row["good"] = file.goods[*n.good].id;
    } else {
      row["aggregator"] = n.aggregator->to_string();
    }
    row["value"] = values[k];
    out.push_back(std::move(row));
  }
  return out;
}

double required_utility(const Scenario& s, const Options& opt) {
  if (opt.utility) return *opt.utility;
  if (!s.utility) throw UsageError("scenario \"" + s.name + "\" has no utility (pass --utility)");
  return *s.utility;
}

double required_income(const Scenario& s, const Options& opt) {
  if (opt.income) return *opt.income;
  if (!s.income) throw UsageError("scenario \"" + s.name + "\" has no income (pass --income)");
  return *s.income;
}

Document demand_block(const ScenarioFile& file, const Scenario& s, const DemandReport& r) {
  Document b;
  b["scenario"] = s.name;
  b["utility"] = r.utility;
  b["expenditure"] = r.expenditure;
  b["quantities"] = by_good(file, r.quantities.values());
  b["leaf_budget_shares"] = by_good(file, r.leaf_budget_shares);
  b["node_budget_shares"] = node_table(file, r.node_budget_shares);
  b["node_quantities"] = node_table(file, r.node_quantities);
  b["node_prices"] = node_table(file, r.price_index_per_node);
  return b;
}

int emit(std::ostream& out, const Document& doc) {
  write_json(out, doc);
  return kExitOk;
}

int cmd_per_scenario(const std::string& command, const Options& opt, std::ostream& out) {
  const LoadedConfig cfg = load(opt.config);
  const ScenarioFile& file = cfg.file;
  Document doc = header(command, opt, cfg.digest);
  Document results = Document::array();
  for (const Scenario* s : selected(file, opt)) {
    const PositiveVector p = file.prices(*s);
    Document b;
    if (command == "norm") {
      if (!s->quantities) throw UsageError("scenario \"" + s->name + "\" has no quantities");
      const auto values = aggregate_quantity(file.indexing, PositiveVector::quantities(*s->quantities));
      b["scenario"] = s->name;
      b["utility"] = values.root;
      b["node_quantities"] = node_table(file, values.per_node);
    } else if (command == "price") {
      const auto values = aggregate_price(file.indexing, p);
      b["scenario"] = s->name;
      b["unit_cost"] = values.root;
      b["node_prices"] = node_table(file, values.per_node);
    } else if (command == "expenditure") {
      const double u = required_utility(*s, opt);
      b["scenario"] = s->name;
      b["utility"] = u;
      b["expenditure"] = expenditure(file.indexing, u, p);
    } else if (command == "hicksian") {
      b = demand_block(file, *s, hicksian_demand(file.indexing, required_utility(*s, opt), p));
    } else if (command == "marshallian") {
      b = demand_block(file, *s, marshallian_demand(file.indexing, required_income(*s, opt), p));
    } else if (command == "shares") {
      const BudgetShares shares = budget_shares(file.indexing, p);
      b["scenario"] = s->name;
      b["leaf_budget_shares"] = by_good(file, shares.leaf_shares);
      b["node_budget_shares"] = node_table(file, shares.node_shares);
    }
    results.push_back(std::move(b));
  }
  doc["results"] = std::move(results);
  return emit(out, doc);
}

int cmd_index(const Options& opt, std::ostream& out) {
  const LoadedConfig cfg = load(opt.config);
  const Scenario& from = cfg.file.scenario(opt.from);
  const Scenario& to = cfg.file.scenario(opt.to);
  const PriceIndexResult r = konus_index(cfg.file.indexing, cfg.file.prices(to), cfg.file.prices(from));
  Document doc = header("index", opt, cfg.digest);
  Document b;
  b["from"] = from.name;
  b["to"] = to.name;
  b["index"] = r.index;
  b["numerator_cost"] = r.numerator_cost;
  b["denominator_cost"] = r.denominator_cost;
  doc["results"] = Document::array({b});
  return emit(out, doc);
}

Document report_json(const oracle::OracleReport& r) {
  Document b;
  b["name"] = r.name;
  b["n_tested"] = r.n_tested;
  b["n_violations"] = r.n_violations;
  b["worst_relative_gap"] = r.worst_relative_gap ? Document(*r.worst_relative_gap) : Document(nullptr);
  b["worst_case_inputs"] = r.worst_case_inputs.empty() ? Document(nullptr)
                                                       : Document::parse(r.worst_case_inputs);
  return b;
}

int cmd_verify(const Options& opt, std::ostream& out) {
  oracle::OracleConfig cfg;
  cfg.seed = opt.seed;
  cfg.n_samples = opt.samples;
  cfg.threads = opt.threads > 0 ? opt.threads : threads_from_environment();
  const auto suite = oracle::sample_inequalities(cfg);
  const auto agreement = oracle::check_oracle_agreement(cfg, opt.oracle_samples);

  Document doc = header("verify", opt, "");
  doc["seed"] = opt.seed;
  doc["samples"] = opt.samples;
  Document ineq = Document::array();
  for (const auto* r : {&suite.young, &suite.reverse_holder, &suite.l0_holder, &suite.direct_sum}) {
    ineq.push_back(report_json(*r));
  }
  doc["inequalities"] = std::move(ineq);

  Document ag;
  ag["n_tested"] = agreement.n_tested;
  ag["n_undercut"] = agreement.n_undercut;
  ag["n_mismatch"] = agreement.n_mismatch;
  ag["tolerance"] = oracle::kAgreementTolerance;
  ag["min_relative_difference"] = agreement.n_tested ? Document(agreement.min_relative_difference) : Document(nullptr);
  ag["max_relative_difference"] = agreement.n_tested ? Document(agreement.max_relative_difference) : Document(nullptr);
  ag["worst_case_inputs"] = agreement.worst_case_inputs.empty() ? Document(nullptr)
                                                                : Document::parse(agreement.worst_case_inputs);
  doc["oracle_agreement"] = std::move(ag);

  const std::size_t violations = suite.total_violations() + agreement.n_undercut + agreement.n_mismatch;
  doc["n_violations"] = violations;
  write_json(out, doc);
  return violations > 0 ? kExitVerificationFailed : kExitOk;
}

Exponent parse_ball_exponent(const std::string& text) {
  if (text == "cobb_douglas" || text == "cd") return Exponent::cobb_douglas();
  if (text == "-inf" || text == "-infinity") return Exponent::neg_infinity();
  if (text == "inf" || text == "+inf" || text == "infinity") return Exponent::pos_infinity();
  double r = 0.0;
  try {
    std::size_t used = 0;
    r = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw UsageError("--r expects a number, -inf, inf or cobb_douglas (got \"" + text + "\")");
  }
  return Exponent::from_value(r);
}

int cmd_ball(const Options& opt, std::ostream& out) {
  const Exponent e = parse_ball_exponent(opt.ball_r);
  std::optional<WeightVector> theta;
  if (!opt.ball_theta.empty()) theta.emplace(opt.ball_theta);
  if (e.kind() == ExponentKind::cobb_douglas && !theta) theta = WeightVector::uniform(2);

  std::vector<BallPoint> points;
  if (!opt.ball_at.empty()) {
    for (double x1 : opt.ball_at) {
      auto x2 = solve_unit_level(e, x1, theta);
      if (!x2) throw UsageError("no positive solution at x1 = " + format_double(x1));
      points.push_back({x1, *x2});
    }
  } else {
    points = ball_points(e, opt.ball_n, theta);
  }
  const std::string r_column = e.kind() == ExponentKind::cobb_douglas ? "0" : e.to_string();
  out << "x1,x2,r\n";
  for (const auto& pt : points) out << format_double(pt.x1) << ',' << format_double(pt.x2) << ',' << r_column << '\n';
  return kExitOk;
}

}  // namespace

unsigned threads_from_environment() {
  const char* raw = std::getenv("CES_DEMAND_THREADS");
  if (!raw || !*raw) return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (*end != '\0' || v == 0 || v > 4096) return 0;
  return static_cast<unsigned>(v);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"CES / Cobb-Douglas / Armington demand calculator", kToolName};
  app.require_subcommand(1);
  Options opt;

  auto config_cmd = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--scenario", opt.scenario, "Scenario name (default: all)");
    sub->add_flag("--deterministic", opt.deterministic, "Omit the timestamp");
    return sub;
  };

  config_cmd("norm", "Aggregate quantity U(x) of each scenario's quantities");
  config_cmd("price", "Unit-utility cost (aggregate price) of each scenario");
  config_cmd("expenditure", "Expenditure e(u, p)")
      ->add_option("--utility", opt.utility, "Override the scenario utility");
  config_cmd("hicksian", "Hicksian demand at utility u")
      ->add_option("--utility", opt.utility, "Override the scenario utility");
  config_cmd("marshallian", "Marshallian demand at income m")
      ->add_option("--income", opt.income, "Override the scenario income");
  config_cmd("shares", "Budget shares at each scenario's prices");

  CLI::App* index = app.add_subcommand("index", "Konüs price index between two scenarios");
  index->add_option("--config", opt.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  index->add_option("--from", opt.from, "Base-period scenario")->required();
  index->add_option("--to", opt.to, "Comparison scenario")->required();
  index->add_flag("--deterministic", opt.deterministic, "Omit the timestamp");

  CLI::App* verify = app.add_subcommand("verify", "Randomized inequality and oracle checks");
  verify->add_option("--seed", opt.seed, "Master seed");
  verify->add_option("--samples", opt.samples, "Samples per inequality");
  verify->add_option("--oracle-samples", opt.oracle_samples, "Brute-force agreement instances");
  verify->add_option("--threads", opt.threads, "Worker threads (default: CES_DEMAND_THREADS or all cores)");
  verify->add_flag("--deterministic", opt.deterministic, "Omit the timestamp");

  CLI::App* ball = app.add_subcommand("ball", "Points on the unit level set ||(x1, x2)|| = 1 as CSV");
  ball->add_option("--r", opt.ball_r, "Exponent: number, -inf, inf or cobb_douglas")->required();
  ball->add_option("--theta", opt.ball_theta, "Two Cobb-Douglas weights")->delimiter(',')->expected(2);
  ball->add_option("--n", opt.ball_n, "Number of grid points")->check(CLI::PositiveNumber);
  ball->add_option("--at", opt.ball_at, "Evaluate these x1 values instead of the grid")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "index") return cmd_index(opt, out);
    if (command == "verify") return cmd_verify(opt, out);
    if (command == "ball") return cmd_ball(opt, out);
    return cmd_per_scenario(command, opt, out);
  } catch (const ScenarioError& e) {
    err << "error: " << opt.config << ": " << e.what() << '\n';
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitValidation;
}

}  // namespace ces::cli
