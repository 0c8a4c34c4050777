#pragma once

#include "modtest/mod_test.hpp"

namespace modtest {

/// Decorrelated differences m = Sigma^{-1/2} (t_1, ..., t_n)'. The adjusted
/// statistic is max_i m_i^2; after centering it follows a Type I extreme
/// value law, so no Monte Carlo calibration is needed.
struct AdjustedComponents {
  Eigen::VectorXd m;
  bool clipped = false;

  double statistic() const { return m.cwiseAbs2().maxCoeff(); }
};

AdjustedComponents camod_statistic(const ModComponents& components,
                                   const InvSqrtResult& sigma_inv_sqrt);

/// Centered statistic x = t_adj - 2 log n + log log n (natural logs).
double gumbel_centering(double t_adj, int n);

/// p = 1 - exp(-exp(-x/2) / sqrt(pi)), the upper tail of the limit law.
double gumbel_pvalue(double x);

/// (1-alpha)-quantile q = -log(pi) - 2 log(log(1/(1-alpha))); the exact
/// inverse of gumbel_pvalue.
double gumbel_critical(double alpha);

TestReport finish_camod(const Pipeline& pipe, const PooledSample& sample,
                        const TestConfig& config);

/// Covariance-adjusted test: same pipeline as mod_test, then closed-form
/// extreme-value calibration. Rejects when the centered statistic reaches
/// the critical value (equivalently, p <= alpha).
TestReport camod_test(const PooledSample& sample, const TestConfig& config);

}  // namespace modtest
