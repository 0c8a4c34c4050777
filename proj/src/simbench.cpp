#include "modtest/simbench.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "modtest/camod.hpp"
#include "modtest/mod_test.hpp"
#include "modtest/parallel.hpp"
#include "modtest/rng.hpp"

namespace modtest {

std::string to_string(Setting s) {
  switch (s) {
    case Setting::IA: return "IA";
    case Setting::IB: return "IB";
    default: return "II";
  }
}

std::string to_string(Case c) {
  switch (c) {
    case Case::mean_shift: return "mean_shift";
    case Case::cov_shift: return "cov_shift";
    case Case::dist_shift: return "dist_shift";
    case Case::mixture_outlier: return "mixture";
    default: return "null";
  }
}

int ScenarioSpec::groups() const {
  if (setting == Setting::IA) return 2;
  if (setting == Setting::IB) return 6;
  return k;
}

std::vector<int> ScenarioSpec::group_sizes() const {
  if (groups() == 2) {
    const int first = n / 3;
    return {first, n - first};
  }
  std::vector<int> sizes(groups(), n / groups());
  return sizes;
}

void ScenarioSpec::validate() const {
  if (p < 1) throw InvalidSpec("p must be at least 1");
  if (replications < 0) throw InvalidSpec("replications must be non-negative");
  if (setting == Setting::II) {
    if (k != 2 && k != 6)
      throw InvalidSpec("setting II supports k = 2 or k = 6");
    if (d < 1) throw InvalidSpec("regression needs at least one covariate");
  }
  const int g = groups();
  if (g == 6 && n % 6 != 0)
    throw InvalidSpec("n must be divisible by 6 for six samples");
  for (int size : group_sizes()) {
    if (size < 2) throw InvalidSpec("every sample needs at least 2 observations");
    if (setting == Setting::II && size <= d)
      throw InvalidSpec("every sample needs more observations than covariates");
  }
  if (signal) {
    if (scenario == Case::dist_shift)
      throw InvalidSpec(
          "the distribution-shift case uses a fixed t distribution; "
          "--signal does not apply");
    if (scenario == Case::null_case && *signal != 0.0)
      throw InvalidSpec("the null case has no signal");
    if (*signal < 0.0 || !std::isfinite(*signal))
      throw InvalidSpec("signal must be finite and non-negative");
    if (scenario == Case::mixture_outlier && *signal >= 1.0)
      throw InvalidSpec("mixture weight must lie in [0, 1)");
  }
}

double ScenarioSpec::resolved_signal() const {
  if (signal) return *signal;
  const double root_p = std::sqrt(static_cast<double>(p));
  switch (scenario) {
    case Case::mean_shift:
      if (setting == Setting::IB) return 2.6 / root_p;
      if (setting == Setting::II && k == 6) return 1.8 / root_p;
      return 2.0 / root_p;
    case Case::cov_shift:
      if (setting == Setting::IB) return 1.0 / root_p;
      if (setting == Setting::II && k == 6) return 0.75 / root_p;
      return 0.8 / root_p;
    case Case::mixture_outlier:
      return 0.05;
    default:
      return 0.0;
  }
}

int ScenarioSpec::t_dof() const { return groups() == 2 ? 45 : 30; }

namespace {

void fill_standard_normal(Eigen::Ref<Eigen::MatrixXd> block,
                          std::mt19937_64& engine) {
  std::normal_distribution<double> normal;
  for (Eigen::Index j = 0; j < block.cols(); ++j)
    for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = normal(engine);
}

// covariance I + theta * 11' via the exact rank-one square root:
// x = z + (sqrt(1 + theta p) - 1)/p * (1'z) * 1
void fill_cov_shift(Eigen::Ref<Eigen::MatrixXd> block, std::mt19937_64& engine,
                    double theta) {
  const double p = static_cast<double>(block.rows());
  const double c = (std::sqrt(1.0 + theta * p) - 1.0) / p;
  std::normal_distribution<double> normal;
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      block(i, j) = normal(engine);
      total += block(i, j);
    }
    block.col(j).array() += c * total;
  }
}

// multivariate t with df degrees of freedom, rescaled so the covariance is
// exactly the identity
void fill_t_scaled(Eigen::Ref<Eigen::MatrixXd> block, std::mt19937_64& engine,
                   int df) {
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi2(static_cast<double>(df));
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = normal(engine);
    const double s = chi2(engine);
    block.col(j) *= std::sqrt((df - 2.0) / s);
  }
}

// (1 - eta) N(0, I) + eta N(20 * 1, 3I)
void fill_mixture(Eigen::Ref<Eigen::MatrixXd> block, std::mt19937_64& engine,
                  double eta) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    const bool outlier = uniform(engine) < eta;
    for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = normal(engine);
    if (outlier)
      block.col(j) = (20.0 + std::sqrt(3.0) * block.col(j).array()).matrix();
  }
}

void fill_alternative(Eigen::Ref<Eigen::MatrixXd> block,
                      std::mt19937_64& engine, const ScenarioSpec& spec) {
  switch (spec.scenario) {
    case Case::mean_shift:
      fill_standard_normal(block, engine);
      block.array() += spec.resolved_signal();
      break;
    case Case::cov_shift:
      fill_cov_shift(block, engine, spec.resolved_signal());
      break;
    case Case::dist_shift:
      fill_t_scaled(block, engine, spec.t_dof());
      break;
    case Case::mixture_outlier:
      fill_mixture(block, engine, spec.resolved_signal());
      break;
    default:
      fill_standard_normal(block, engine);
      break;
  }
}

// Pooled errors/observations: the first half of the samples (one sample for
// two groups, three for six) follows N(0, I); the rest follow the case law.
Eigen::MatrixXd draw_observations(const ScenarioSpec& spec,
                                  std::mt19937_64& engine,
                                  const std::vector<int>& sizes) {
  Eigen::MatrixXd data(spec.p, spec.n);
  const int g_total = static_cast<int>(sizes.size());
  const int null_groups = g_total == 2 ? 1 : g_total / 2;
  int offset = 0;
  for (int g = 0; g < g_total; ++g) {
    auto block = data.middleCols(offset, sizes[g]);
    if (g < null_groups)
      fill_standard_normal(block, engine);
    else
      fill_alternative(block, engine, spec);
    offset += sizes[g];
  }
  return data;
}

}  // namespace

GeneratedData generate(const ScenarioSpec& spec) {
  spec.validate();
  const std::vector<int> sizes = spec.group_sizes();
  auto engine = make_engine(spec.seed, 0);
  Eigen::MatrixXd observations = draw_observations(spec, engine, sizes);

  if (spec.setting != Setting::II) {
    std::vector<int> codes;
    codes.reserve(spec.n);
    for (std::size_t g = 0; g < sizes.size(); ++g)
      codes.insert(codes.end(), sizes[g], static_cast<int>(g));
    return detail::make_pooled(observations, std::move(codes),
                               static_cast<int>(sizes.size()));
  }

  auto w_engine = make_engine(spec.seed, 1);
  RegressionSample regression;
  const Eigen::MatrixXd beta = Eigen::MatrixXd::Ones(spec.p, spec.d);
  int offset = 0;
  for (int size : sizes) {
    Eigen::MatrixXd w(size, spec.d);
    fill_standard_normal(w, w_engine);
    regression.responses.push_back(observations.middleCols(offset, size) +
                                   beta * w.transpose());
    regression.covariates.push_back(std::move(w));
    offset += size;
  }
  return regression;
}

ExperimentTable run_experiment(const ScenarioSpec& spec,
                               const std::vector<Method>& methods,
                               const TestConfig& config) {
  spec.validate();
  config.validate();
  if (spec.replications == 0) return {};

  struct RepResult {
    bool reject_mod = false;
    bool reject_camod = false;
    std::string error;
  };
  std::vector<RepResult> results(spec.replications);

  const auto start = std::chrono::steady_clock::now();
  parallel_for(spec.replications, config.threads, [&](int rep) {
    auto& slot = results[rep];
    try {
      const std::uint64_t root = mix_seed(spec.seed, rep);
      ScenarioSpec draw = spec;
      draw.seed = mix_seed(root, 1);
      TestConfig test_config = config;
      test_config.seed = mix_seed(root, 2);
      test_config.threads = 1;

      GeneratedData data = generate(draw);
      PooledSample pooled =
          std::holds_alternative<PooledSample>(data)
              ? std::get<PooledSample>(std::move(data))
              : pool_residuals(std::get<RegressionSample>(data));
      Pipeline pipe = build_pipeline(pooled, test_config);
      for (Method method : methods) {
        const TestReport report = method == Method::mod
                                      ? finish_mod(pipe, pooled, test_config)
                                      : finish_camod(pipe, pooled, test_config);
        (method == Method::mod ? slot.reject_mod : slot.reject_camod) =
            report.reject;
      }
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  });
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();

  int completed = spec.replications;
  std::string first_error;
  for (int rep = 0; rep < spec.replications; ++rep) {
    if (!results[rep].error.empty()) {
      completed = rep;
      first_error = results[rep].error;
      break;
    }
  }

  ExperimentTable table;
  for (Method method : methods) {
    ExperimentRow row;
    row.method = to_string(method);
    row.setting = to_string(spec.setting);
    row.scenario = to_string(spec.scenario);
    row.n = spec.n;
    row.p = spec.p;
    row.k = spec.groups();
    row.seed = spec.seed;
    row.wall_time_ms = elapsed_ms;
    if (!first_error.empty()) {
      row.rejection_rate = std::numeric_limits<double>::quiet_NaN();
      row.replications = completed;
      row.error = first_error;
    } else {
      long rejections = 0;
      for (const auto& r : results)
        rejections += method == Method::mod ? r.reject_mod : r.reject_camod;
      row.replications = spec.replications;
      row.rejection_rate = spec.replications == 0
                               ? 0.0
                               : static_cast<double>(rejections) /
                                     spec.replications;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    std::size_t begin = field.find_first_not_of(' ');
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

GeneratedData ingest_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream file(path);
  if (!file) throw InputError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(file, line))
    throw ParseError("'" + path + "' is empty");
  const std::vector<std::string> header = split_line(line);

  int group_col = -1;
  std::vector<int> covariate_cols;
  std::vector<int> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == options.group_column) {
      if (group_col >= 0)
        throw ParseError("duplicate group column '" + options.group_column + "'");
      group_col = static_cast<int>(c);
    } else if (options.regression &&
               header[c].rfind(options.covariate_prefix, 0) == 0) {
      covariate_cols.push_back(static_cast<int>(c));
    } else {
      feature_cols.push_back(static_cast<int>(c));
    }
  }
  if (group_col < 0)
    throw ParseError("no column named '" + options.group_column + "' in '" +
                     path + "'");
  if (feature_cols.empty())
    throw ParseError("no feature columns found in '" + path + "'");
  if (options.regression && covariate_cols.empty())
    throw ParseError("regression mode needs columns prefixed '" +
                     options.covariate_prefix + "'");

  std::vector<std::string> labels;
  std::vector<std::vector<double>> feature_rows;
  std::vector<std::vector<double>> covariate_rows;
  std::vector<bool> column_numeric(header.size(), false);
  int line_number = 1;
  while (std::getline(file, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size())
      throw ParseError("line " + std::to_string(line_number) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));

    auto parse_cell = [&](int col) {
      double value = 0.0;
      if (!parse_double(fields[col], value)) {
        const std::string where = "line " + std::to_string(line_number) +
                                  ", column '" + header[col] + "'";
        if (column_numeric[col])
          throw MixedTypeColumn("column '" + header[col] +
                                "' mixes numeric and non-numeric values (" +
                                where + ": '" + fields[col] + "')");
        throw ParseError(where + ": cannot parse '" + fields[col] +
                         "' as a number");
      }
      column_numeric[col] = true;
      return value;
    };

    labels.push_back(fields[group_col]);
    std::vector<double> features;
    features.reserve(feature_cols.size());
    for (int col : feature_cols) features.push_back(parse_cell(col));
    feature_rows.push_back(std::move(features));
    if (options.regression) {
      std::vector<double> covariates;
      covariates.reserve(covariate_cols.size());
      for (int col : covariate_cols) covariates.push_back(parse_cell(col));
      covariate_rows.push_back(std::move(covariates));
    }
  }
  if (labels.empty()) throw ParseError("'" + path + "' has no data rows");

  const int n = static_cast<int>(labels.size());
  const int p = static_cast<int>(feature_cols.size());
  Eigen::MatrixXd data(p, n);
  for (int i = 0; i < n; ++i)
    for (int f = 0; f < p; ++f) data(f, i) = feature_rows[i][f];

  if (!options.regression) return validate_sample(data, labels);

  // regression: split rows into per-group blocks in first-appearance order
  PooledSample pooled = validate_sample(data, labels);
  const int d = static_cast<int>(covariate_cols.size());
  RegressionSample regression;
  for (int g = 0; g < pooled.k(); ++g) {
    const auto& members = pooled.members[g];
    Eigen::MatrixXd x(p, members.size());
    Eigen::MatrixXd w(members.size(), d);
    for (std::size_t idx = 0; idx < members.size(); ++idx) {
      x.col(idx) = data.col(members[idx]);
      for (int c = 0; c < d; ++c) w(idx, c) = covariate_rows[members[idx]][c];
    }
    regression.responses.push_back(std::move(x));
    regression.covariates.push_back(std::move(w));
  }
  regression.validate();
  return regression;
}

namespace {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

nlohmann::ordered_json report_to_json(const TestReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["statistic"] = report.statistic;
  if (report.centered_statistic)
    j["centered_statistic"] = *report.centered_statistic;
  j["p_value"] = report.p_value;
  if (report.p_mod_replicated) j["p_mod_replicated"] = *report.p_mod_replicated;
  j["critical_value"] = report.critical_value;
  j["decision"] = report.reject ? "reject" : "retain";
  j["alpha"] = report.alpha;
  j["tau"] = report.tau;
  if (report.tau_quantile)
    j["tau_quantile"] = *report.tau_quantile;
  else
    j["tau_quantile"] = nullptr;
  j["p0_hat"] = report.p0_hat;
  j["p12_hat"] = report.p12_hat;
  j["n"] = report.n;
  j["p"] = report.p;
  j["k"] = report.k;
  j["group_sizes"] = report.group_sizes;
  j["regression"] = report.regression;
  if (report.regression_d)
    j["d"] = *report.regression_d;
  else
    j["d"] = nullptr;
  j["pd_clipped"] = report.pd_clipped;
  j["seed"] = report.seed;
  j["version"] = kVersion;
  if (report.nu_hat) {
    std::vector<double> nu(report.nu_hat->data(),
                           report.nu_hat->data() + report.nu_hat->size());
    j["nu_hat"] = nu;
  }
  j["warnings"] = report.warnings;
  return j;
}

std::string reports_to_csv(const std::vector<TestReport>& reports) {
  std::string out =
      "method,statistic,centered_statistic,p_value,p_mod_replicated,"
      "critical_value,decision,alpha,tau,tau_quantile,p0_hat,p12_hat,n,p,k,"
      "group_sizes,regression,d,pd_clipped,seed,version,warnings\n";
  for (const auto& r : reports) {
    out += r.method + ',' + format_double(r.statistic) + ',';
    out += (r.centered_statistic ? format_double(*r.centered_statistic) : "") +
           std::string(",");
    out += format_double(r.p_value) + ',';
    out += (r.p_mod_replicated ? format_double(*r.p_mod_replicated) : "") +
           std::string(",");
    out += format_double(r.critical_value) + ',';
    out += (r.reject ? "reject" : "retain") + std::string(",");
    out += format_double(r.alpha) + ',' + format_double(r.tau) + ',';
    out += (r.tau_quantile ? format_double(*r.tau_quantile) : "") +
           std::string(",");
    out += format_double(r.p0_hat) + ',' + format_double(r.p12_hat) + ',';
    out += std::to_string(r.n) + ',' + std::to_string(r.p) + ',' +
           std::to_string(r.k) + ',';
    for (std::size_t g = 0; g < r.group_sizes.size(); ++g)
      out += (g ? ";" : "") + std::to_string(r.group_sizes[g]);
    out += ',';
    out += (r.regression ? "true" : "false") + std::string(",");
    out += (r.regression_d ? std::to_string(*r.regression_d) : "") + ",";
    out += (r.pd_clipped ? "true" : "false") + std::string(",");
    out += std::to_string(r.seed) + ',' + kVersion + ',';
    for (std::size_t w = 0; w < r.warnings.size(); ++w)
      out += (w ? ";" : "") + r.warnings[w];
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json table_to_json(const ExperimentTable& table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["setting"] = r.setting;
    j["case"] = r.scenario;
    j["n"] = r.n;
    j["p"] = r.p;
    j["k"] = r.k;
    if (std::isnan(r.rejection_rate))
      j["rejection_rate"] = nullptr;
    else
      j["rejection_rate"] = r.rejection_rate;
    j["replications"] = r.replications;
    j["seed"] = r.seed;
    j["error"] = r.error;
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["rows"] = std::move(rows);
  return j;
}

std::string table_to_csv(const ExperimentTable& table) {
  std::string out =
      "method,setting,case,n,p,k,rejection_rate,replications,seed,error\n";
  for (const auto& r : table.rows) {
    out += r.method + ',' + r.setting + ',' + r.scenario + ',';
    out += std::to_string(r.n) + ',' + std::to_string(r.p) + ',' +
           std::to_string(r.k) + ',';
    out += (std::isnan(r.rejection_rate) ? ""
                                         : format_double(r.rejection_rate)) +
           std::string(",");
    out += std::to_string(r.replications) + ',' + std::to_string(r.seed) + ',';
    out += r.error + '\n';
  }
  return out;
}

}  // namespace modtest
