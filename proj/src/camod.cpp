#include "modtest/camod.hpp"

#include <cmath>
#include <numbers>

namespace modtest {

AdjustedComponents camod_statistic(const ModComponents& components,
                                   const InvSqrtResult& sigma_inv_sqrt) {
  if (sigma_inv_sqrt.m.cols() != components.t.size())
    throw InputError("inverse square root dimension does not match t vector");
  return AdjustedComponents{sigma_inv_sqrt.m * components.t,
                            sigma_inv_sqrt.clipped};
}

double gumbel_centering(double t_adj, int n) {
  if (n < 2) throw InputError("centering needs n >= 2");
  return t_adj - 2.0 * std::log(static_cast<double>(n)) +
         std::log(std::log(static_cast<double>(n)));
}

double gumbel_pvalue(double x) {
  return -std::expm1(-std::exp(-x / 2.0) / std::sqrt(std::numbers::pi));
}

double gumbel_critical(double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0)
    throw InvalidConfig("alpha must lie in (0, 1)");
  return -std::log(std::numbers::pi) - 2.0 * std::log(-std::log1p(-alpha));
}

TestReport finish_camod(const Pipeline& pipe, const PooledSample& sample,
                        const TestConfig& config) {
  InvSqrtResult isq = inv_sqrt(pipe.sigma, config.ridge);
  AdjustedComponents adjusted = camod_statistic(pipe.components, isq);
  const double statistic = adjusted.statistic();
  const double centered = gumbel_centering(statistic, sample.n());
  const double critical = gumbel_critical(config.alpha);

  TestReport report;
  report.method = "camod";
  report.statistic = statistic;
  report.centered_statistic = centered;
  report.p_value = gumbel_pvalue(centered);
  report.critical_value = critical;
  report.reject = centered >= critical;
  report.alpha = config.alpha;
  report.tau = pipe.tau;
  report.tau_quantile = pipe.tau_quantile;
  report.p0_hat = pipe.probs.p0;
  report.p12_hat = pipe.probs.p12;
  report.n = sample.n();
  report.p = sample.p();
  report.k = sample.k();
  report.group_sizes = sample.group_sizes;
  report.pd_clipped = adjusted.clipped;
  report.seed = config.seed;
  if (adjusted.clipped)
    report.warnings.push_back(
        "estimated covariance is numerically singular; eigenvalues were "
        "floored before inversion");
  if (config.diagnostics)
    report.nu_hat = power_diagnostics(pipe.graph, sample).nu_hat;
  return report;
}

TestReport camod_test(const PooledSample& sample, const TestConfig& config) {
  Pipeline pipe = build_pipeline(sample, config);
  return finish_camod(pipe, sample, config);
}

}  // namespace modtest
