#include "modtest/covariance.hpp"

#include <cmath>
#include <random>

#include "modtest/rng.hpp"

namespace modtest {

GroupStructuredCovariance estimate_sigma(double p0, double p12,
                                         const std::vector<int>& sizes) {
  const int k = static_cast<int>(sizes.size());
  if (k < 2) throw TooFewGroups("need at least 2 groups");
  long n = 0;
  for (int s : sizes) {
    if (s < 2) throw EmptyGroup("every group needs at least 2 observations");
    n += s;
  }
  const double p22 = p0 * (1.0 - p0);
  if (!(p22 - p12 > 0.0))
    throw DegenerateVariance(
        "p22 - p12 = " + std::to_string(p22 - p12) +
        " is not positive; the connectivity graph is too close to complete "
        "or empty (tau too extreme)");

  GroupStructuredCovariance cov;
  cov.k = k;
  cov.sizes = sizes;
  cov.within.resize(k);
  cov.between = Eigen::MatrixXd::Zero(k, k);

  for (int g = 0; g < k; ++g) {
    const double ng = sizes[g];
    const double common = 1.0 / (n - ng) + 1.0 / (ng - 1.0);
    cov.within(g) =
        (common * p12 - (3.0 * p12 - p22) / ((ng - 1.0) * (ng - 1.0))) /
        (common * (p22 - p12));
  }
  for (int g = 0; g < k; ++g) {
    for (int h = g + 1; h < k; ++h) {
      const double ng = sizes[g], nh = sizes[h];
      const double value = std::sqrt(ng - 1.0) * std::sqrt(nh - 1.0) *
                           (p22 - (n + 2.0) * p12) /
                           (std::sqrt(n - ng) * std::sqrt(n - nh) * (n - 1.0) *
                            (p22 - p12));
      cov.between(g, h) = value;
      cov.between(h, g) = value;
    }
  }
  return cov;
}

Eigen::MatrixXd materialize(const GroupStructuredCovariance& cov,
                            const std::vector<int>& group) {
  const int n = static_cast<int>(group.size());
  Eigen::MatrixXd sigma(n, n);
  for (int i = 0; i < n; ++i) {
    sigma(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double value = group[i] == group[j]
                               ? cov.within(group[i])
                               : cov.between(group[i], group[j]);
      sigma(i, j) = value;
      sigma(j, i) = value;
    }
  }
  return sigma;
}

Eigen::MatrixXd materialize(const GroupStructuredCovariance& cov) {
  std::vector<int> group;
  for (int g = 0; g < cov.k; ++g)
    group.insert(group.end(), cov.sizes[g], g);
  return materialize(cov, group);
}

InvSqrtResult inv_sqrt(const Eigen::MatrixXd& sigma, double ridge) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
  if (solver.info() != Eigen::Success)
    throw EigenFailure("symmetric eigendecomposition did not converge");
  const Eigen::VectorXd& eigenvalues = solver.eigenvalues();
  const double floor = ridge * eigenvalues.maxCoeff();
  if (!(floor > 0.0) && !(eigenvalues.minCoeff() > 0.0))
    throw EigenFailure("matrix has no positive eigenvalues");

  bool clipped = false;
  Eigen::VectorXd inv_roots(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    double lambda = eigenvalues(i);
    if (lambda < floor) {
      lambda = floor;
      clipped = true;
    }
    inv_roots(i) = 1.0 / std::sqrt(lambda);
  }
  Eigen::MatrixXd result = solver.eigenvectors() * inv_roots.asDiagonal() *
                           solver.eigenvectors().transpose();
  return {std::move(result), clipped};
}

MaxSqDraws sample_max_sq(const Eigen::MatrixXd& sigma, int n_draws,
                         std::uint64_t seed, double ridge) {
  if (n_draws < 1) throw InvalidConfig("need at least one draw");
  const int n = static_cast<int>(sigma.rows());

  Eigen::MatrixXd factor;
  bool clipped = false;
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) factor = llt.matrixL();
  if (factor.size() == 0 || !factor.allFinite()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
    if (solver.info() != Eigen::Success)
      throw EigenFailure("covariance factorization failed");
    const Eigen::VectorXd& eigenvalues = solver.eigenvalues();
    if (!(eigenvalues.maxCoeff() > 0.0))
      throw EigenFailure("covariance has no positive eigenvalues");
    const double floor = std::max(0.0, ridge * eigenvalues.maxCoeff());
    Eigen::VectorXd roots(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
      double lambda = eigenvalues(i);
      if (lambda < floor) {
        lambda = floor;
        clipped = true;
      }
      roots(i) = std::sqrt(lambda);
    }
    factor = solver.eigenvectors() * roots.asDiagonal();
  }

  MaxSqDraws out;
  out.clipped = clipped;
  out.values.resize(n_draws);
  // Draws are batched into a fixed-width GEMM; the batch layout depends only
  // on (n_draws, kBatch), so repeated calls are bitwise identical.
  constexpr int kBatch = 4096;
  Eigen::MatrixXd z(n, std::min(kBatch, n_draws));
  Eigen::MatrixXd o;
  for (int start = 0; start < n_draws; start += kBatch) {
    const int cols = std::min(kBatch, n_draws - start);
    for (int l = 0; l < cols; ++l) {
      auto engine = make_engine(seed, static_cast<std::uint64_t>(start) + l);
      std::normal_distribution<double> normal;
      for (int i = 0; i < n; ++i) z(i, l) = normal(engine);
    }
    o.noalias() = factor * z.leftCols(cols);
    for (int l = 0; l < cols; ++l)
      out.values[start + l] = o.col(l).cwiseAbs2().maxCoeff();
  }
  return out;
}

}  // namespace modtest
