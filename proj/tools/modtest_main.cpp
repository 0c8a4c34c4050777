#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modtest/camod.hpp"
#include "modtest/mod_test.hpp"
#include "modtest/simbench.hpp"

namespace {

using modtest::Method;

std::vector<Method> parse_methods(const std::string& text) {
  if (text == "both" || text == "mod,camod" || text == "camod,mod")
    return {Method::mod, Method::camod};
  if (text == "mod") return {Method::mod};
  if (text == "camod") return {Method::camod};
  throw modtest::InvalidConfig("unknown method list '" + text +
                               "' (expected mod, camod or both)");
}

modtest::Setting parse_setting(const std::string& text) {
  if (text == "IA") return modtest::Setting::IA;
  if (text == "IB") return modtest::Setting::IB;
  if (text == "II") return modtest::Setting::II;
  throw modtest::InvalidSpec("unknown setting '" + text + "'");
}

modtest::Case parse_case(const std::string& text) {
  if (text == "1") return modtest::Case::mean_shift;
  if (text == "2") return modtest::Case::cov_shift;
  if (text == "3") return modtest::Case::dist_shift;
  if (text == "mixture") return modtest::Case::mixture_outlier;
  if (text == "null") return modtest::Case::null_case;
  throw modtest::InvalidSpec("unknown case '" + text +
                             "' (expected 1, 2, 3, mixture or null)");
}

struct CommonOptions {
  double tau_quantile = 0.5;
  double tau = 0.0;  // 0 = use quantile
  double alpha = 0.05;
  int mc_outer = 100;
  int mc_inner = 200;
  std::uint64_t seed = 12345;
  double ridge = 1e-10;
  int threads = 0;  // 0 = hardware concurrency
  std::string output = "json";

  modtest::TestConfig config() const {
    modtest::TestConfig cfg;
    if (tau > 0.0) cfg.tau = tau;
    cfg.tau_quantile = tau_quantile;
    cfg.alpha = alpha;
    cfg.mc_outer = mc_outer;
    cfg.mc_inner = mc_inner;
    cfg.seed = seed;
    cfg.ridge = ridge;
    cfg.threads = threads;
    return cfg;
  }
};

void add_common_flags(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--tau-quantile", opts.tau_quantile,
                  "Quantile of the pairwise distances used as tau")
      ->default_val(0.5);
  cmd->add_option("--tau", opts.tau, "Explicit threshold (overrides quantile)");
  cmd->add_option("--alpha", opts.alpha, "Significance level")->default_val(0.05);
  cmd->add_option("--mc-outer", opts.mc_outer,
                  "Calibration replicates B (mod only)")
      ->default_val(100);
  cmd->add_option("--mc-inner", opts.mc_inner,
                  "Max-draws per calibration replicate N (mod only)")
      ->default_val(200);
  cmd->add_option("--seed", opts.seed, "RNG seed")->default_val(12345);
  cmd->add_option("--ridge", opts.ridge,
                  "Relative eigenvalue floor for the inverse square root")
      ->default_val(1e-10);
  cmd->add_option("--threads", opts.threads,
                  "Worker threads (0 = all cores); never changes results")
      ->default_val(0);
  cmd->add_option("--output", opts.output, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->default_val("json");
}

int run(int argc, char** argv) {
  CLI::App app{"Maximum-of-differences K-sample distribution tests"};
  app.require_subcommand(1);

  // --- test: run MOD / CA-MOD on a CSV file
  auto* test_cmd = app.add_subcommand("test", "Test a CSV dataset");
  std::string input;
  std::string mode = "both";
  bool regression = false;
  bool diagnostics = false;
  std::string group_column = "group";
  std::string covariate_prefix = "w_";
  CommonOptions test_opts;
  test_cmd->add_option("--input", input, "CSV file with a header row")
      ->required();
  test_cmd->add_option("--mode", mode, "mod, camod or both")
      ->check(CLI::IsMember({"mod", "camod", "both"}))
      ->default_val("both");
  test_cmd->add_flag("--regression", regression,
                     "Treat prefixed columns as covariates and test residuals");
  test_cmd->add_flag("--diagnostics", diagnostics,
                     "Include the per-observation nu diagnostics");
  test_cmd->add_option("--group-col", group_column, "Group column name")
      ->default_val("group");
  test_cmd->add_option("--covariate-prefix", covariate_prefix,
                       "Covariate column prefix (regression mode)")
      ->default_val("w_");
  add_common_flags(test_cmd, test_opts);

  // --- simulate: size/power experiments on synthetic data
  auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation cell");
  std::string setting_text = "IA";
  std::string case_text = "null";
  std::string methods_text = "both";
  modtest::ScenarioSpec spec;
  double signal = -1.0;
  CommonOptions sim_opts;
  sim_cmd->add_option("--setting", setting_text, "IA, IB or II")
      ->check(CLI::IsMember({"IA", "IB", "II"}))
      ->default_val("IA");
  sim_cmd->add_option("--case", case_text, "1, 2, 3, mixture or null")
      ->default_val("null");
  sim_cmd->add_option("--n", spec.n, "Total sample size")->default_val(150);
  sim_cmd->add_option("--p", spec.p, "Feature dimension")->default_val(50);
  sim_cmd->add_option("--k", spec.k, "Number of samples (setting II: 2 or 6)")
      ->default_val(2);
  sim_cmd->add_option("--d", spec.d, "Covariate dimension (setting II)")
      ->default_val(2);
  sim_cmd->add_option("--signal", signal,
                      "Signal strength (mu, theta or mixture weight)");
  sim_cmd->add_option("--reps", spec.replications, "Replications")
      ->default_val(200);
  sim_cmd->add_option("--methods", methods_text, "mod, camod or both")
      ->default_val("both");
  add_common_flags(sim_cmd, sim_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 2;
  }

  if (test_cmd->parsed()) {
    modtest::TestConfig config = test_opts.config();
    config.diagnostics = diagnostics;
    modtest::CsvOptions csv;
    csv.group_column = group_column;
    csv.covariate_prefix = covariate_prefix;
    csv.regression = regression;

    modtest::GeneratedData data = modtest::ingest_csv(input, csv);
    std::vector<modtest::TestReport> reports;
    for (Method method : parse_methods(mode)) {
      if (std::holds_alternative<modtest::RegressionSample>(data)) {
        reports.push_back(modtest::regression_test(
            std::get<modtest::RegressionSample>(data), config, method));
      } else {
        const auto& sample = std::get<modtest::PooledSample>(data);
        reports.push_back(method == Method::mod
                              ? modtest::mod_test(sample, config)
                              : modtest::camod_test(sample, config));
      }
    }

    if (test_opts.output == "csv") {
      std::cout << modtest::reports_to_csv(reports);
    } else if (reports.size() == 1) {
      std::cout << modtest::report_to_json(reports[0]).dump(2) << "\n";
    } else {
      nlohmann::ordered_json j = nlohmann::ordered_json::array();
      for (const auto& r : reports) j.push_back(modtest::report_to_json(r));
      std::cout << j.dump(2) << "\n";
    }
    return 0;
  }

  // simulate
  spec.setting = parse_setting(setting_text);
  spec.scenario = parse_case(case_text);
  spec.seed = sim_opts.seed;
  if (sim_cmd->count("--signal") > 0) spec.signal = signal;
  if (spec.setting == modtest::Setting::IA) spec.k = 2;
  if (spec.setting == modtest::Setting::IB) spec.k = 6;

  modtest::ExperimentTable table =
      modtest::run_experiment(spec, parse_methods(methods_text),
                              sim_opts.config());
  for (const auto& row : table.rows)
    std::fprintf(stderr, "# %s %s/%s n=%d p=%d: %.1f ms\n", row.method.c_str(),
                 row.setting.c_str(), row.scenario.c_str(), row.n, row.p,
                 row.wall_time_ms);
  if (sim_opts.output == "csv")
    std::cout << modtest::table_to_csv(table);
  else
    std::cout << modtest::table_to_json(table).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const modtest::DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const modtest::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const modtest::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
