#pragma once

#include "modtest/core.hpp"

namespace modtest {

/// Per-group responses (p x n_k) and covariates (n_k x d) for the residual
/// variant of the tests. All groups share p and d, and each group needs
/// n_k > d so the projection is well defined.
struct RegressionSample {
  std::vector<Eigen::MatrixXd> responses;
  std::vector<Eigen::MatrixXd> covariates;

  int k() const { return static_cast<int>(responses.size()); }
  int p() const { return responses.empty() ? 0 : static_cast<int>(responses[0].rows()); }
  int d() const { return covariates.empty() ? 0 : static_cast<int>(covariates[0].cols()); }
  int n() const;
  void validate() const;
};

/// Least-squares residuals E = X (I - W (W'W)^{-1} W'), computed through an
/// orthonormal basis of the column space of W so near-collinear designs stay
/// stable. Throws SingularDesign when the smallest singular value of W falls
/// below 1e-10 times the largest.
Eigen::MatrixXd ols_residuals(const Eigen::MatrixXd& responses,
                              const Eigen::MatrixXd& covariates);

/// Residuals of every group pooled into one sample, groups kept contiguous.
PooledSample pool_residuals(const RegressionSample& sample);

/// Runs the chosen test on the pooled residuals. The report is flagged as a
/// regression run and carries a warning when p log(n)/n exceeds 1, where the
/// residual approximation becomes unreliable.
TestReport regression_test(const RegressionSample& sample,
                           const TestConfig& config, Method mode);

}  // namespace modtest
