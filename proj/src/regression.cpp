#include "modtest/regression.hpp"

#include <cmath>

#include "modtest/camod.hpp"
#include "modtest/mod_test.hpp"

namespace modtest {

int RegressionSample::n() const {
  int total = 0;
  for (const auto& x : responses) total += static_cast<int>(x.cols());
  return total;
}

void RegressionSample::validate() const {
  if (responses.size() != covariates.size())
    throw InputError("responses and covariates must have one block per group");
  if (responses.size() < 2) throw TooFewGroups("need at least 2 groups");
  const int p_ = p();
  const int d_ = d();
  if (d_ < 1) throw InputError("need at least one covariate column");
  for (std::size_t g = 0; g < responses.size(); ++g) {
    if (responses[g].rows() != p_)
      throw InputError("group " + std::to_string(g + 1) +
                       " has a different feature count");
    if (covariates[g].cols() != d_)
      throw InputError("group " + std::to_string(g + 1) +
                       " has a different covariate count");
    if (covariates[g].rows() != responses[g].cols())
      throw InputError("group " + std::to_string(g + 1) +
                       ": covariate rows must match observation count");
    if (responses[g].cols() <= d_)
      throw InputError("group " + std::to_string(g + 1) + " has " +
                       std::to_string(responses[g].cols()) +
                       " observations; need more than d = " +
                       std::to_string(d_));
    if (!responses[g].allFinite() || !covariates[g].allFinite())
      throw NonFiniteData("group " + std::to_string(g + 1) +
                          " contains NaN or infinite entries");
  }
}

Eigen::MatrixXd ols_residuals(const Eigen::MatrixXd& responses,
                              const Eigen::MatrixXd& covariates) {
  if (covariates.rows() != responses.cols())
    throw InputError("covariate rows must match observation count");
  if (covariates.rows() <= covariates.cols())
    throw InputError("need more observations than covariates");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(covariates, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-10 * sv(0))
    throw SingularDesign("covariate matrix is rank deficient (condition " +
                         std::to_string(sv(0) / sv(sv.size() - 1)) + ")");

  // E = X - (X U) U' with U an orthonormal basis of col(W)
  const Eigen::MatrixXd& u = svd.matrixU();
  return responses - (responses * u) * u.transpose();
}

PooledSample pool_residuals(const RegressionSample& sample) {
  sample.validate();
  const int n = sample.n();
  const int p = sample.p();
  Eigen::MatrixXd pooled(p, n);
  std::vector<int> codes(n);
  int offset = 0;
  for (int g = 0; g < sample.k(); ++g) {
    const Eigen::MatrixXd residuals =
        ols_residuals(sample.responses[g], sample.covariates[g]);
    const int ng = static_cast<int>(residuals.cols());
    pooled.middleCols(offset, ng) = residuals;
    std::fill(codes.begin() + offset, codes.begin() + offset + ng, g);
    offset += ng;
  }
  return detail::make_pooled(pooled, std::move(codes), sample.k());
}

TestReport regression_test(const RegressionSample& sample,
                           const TestConfig& config, Method mode) {
  PooledSample pooled = pool_residuals(sample);
  Pipeline pipe = build_pipeline(pooled, config);
  TestReport report = mode == Method::mod ? finish_mod(pipe, pooled, config)
                                          : finish_camod(pipe, pooled, config);
  report.regression = true;
  report.regression_d = sample.d();
  const double n = pooled.n();
  if (pooled.p() * std::log(n) / n > 1.0)
    report.warnings.push_back(
        "p*log(n)/n exceeds 1; the residual-based test needs p log(n)/n "
        "small to be reliable");
  return report;
}

}  // namespace modtest
