#pragma once

#include <cstdint>

#include "modtest/core.hpp"

namespace modtest {

/// Group-structured covariance of the standardized difference vector:
/// unit diagonal, one common off-diagonal value per group (within) and one
/// value per group pair (between). The dense n x n form is fully determined
/// by these K + K(K-1)/2 numbers.
struct GroupStructuredCovariance {
  int k = 0;
  std::vector<int> sizes;
  Eigen::VectorXd within;   // a_k, same-group off-diagonal value
  Eigen::MatrixXd between;  // b_kl for k != l; diagonal entries unused (0)
};

/// Builds the covariance from the pooled estimates p0 and p12, with
/// p22 = p0(1-p0). Requires p22 - p12 > 0; a complete or empty graph
/// violates this and raises DegenerateVariance.
GroupStructuredCovariance estimate_sigma(double p0, double p12,
                                         const std::vector<int>& sizes);

/// Dense form with groups laid out contiguously in the order of `sizes`.
Eigen::MatrixXd materialize(const GroupStructuredCovariance& cov);

/// Dense form for an arbitrary observation-to-group assignment.
Eigen::MatrixXd materialize(const GroupStructuredCovariance& cov,
                            const std::vector<int>& group);

struct InvSqrtResult {
  Eigen::MatrixXd m;
  bool clipped = false;  // true when the eigenvalue floor was applied
};

/// Symmetric inverse square root via eigendecomposition. Eigenvalues below
/// ridge * lambda_max are raised to that floor and the result is flagged,
/// since the extreme-value calibration assumes a positive definite matrix.
InvSqrtResult inv_sqrt(const Eigen::MatrixXd& sigma, double ridge = 1e-10);

struct MaxSqDraws {
  std::vector<double> values;
  bool clipped = false;
};

/// Draws n_draws realizations of max_i Z_i^2 with Z ~ N(0, sigma), using one
/// Cholesky factorization (eigendecomposition with the ridge floor as the
/// fallback for semi-definite input). Draw l is generated from an engine
/// seeded with (seed, l), so the output is independent of scheduling.
MaxSqDraws sample_max_sq(const Eigen::MatrixXd& sigma, int n_draws,
                         std::uint64_t seed, double ridge = 1e-10);

}  // namespace modtest
