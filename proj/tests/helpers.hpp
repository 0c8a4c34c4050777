#pragma once

#include <random>
#include <vector>

#include "modtest/core.hpp"
#include "modtest/rng.hpp"

namespace testutil {

inline modtest::PooledSample make_sample(const Eigen::MatrixXd& data,
                                         const std::vector<int>& labels) {
  return modtest::validate_sample(data, labels);
}

/// The 4-point toy: two tight clusters at 0 and 10, tau = 1 connects only
/// the within-cluster pairs.
inline modtest::PooledSample toy_sample() {
  Eigen::MatrixXd x(1, 4);
  x << 0.0, 0.5, 10.0, 10.4;
  return make_sample(x, {1, 1, 2, 2});
}

inline Eigen::MatrixXd gaussian_matrix(int rows, int cols,
                                       std::uint64_t seed) {
  auto engine = modtest::make_engine(seed, 0);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(engine);
  return m;
}

/// Random orthogonal matrix from the QR factorization of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(int size, std::uint64_t seed) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(size, size, seed));
  return qr.householderQ();
}

inline std::vector<int> half_labels(int n) {
  std::vector<int> labels(n, 1);
  for (int i = n / 2; i < n; ++i) labels[i] = 2;
  return labels;
}

/// Random binary symmetric adjacency with zero diagonal.
inline Eigen::MatrixXi random_graph(int n, double density, std::uint64_t seed) {
  auto engine = modtest::make_engine(seed, 1);
  std::bernoulli_distribution edge(density);
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = edge(engine) ? 1 : 0;
  return a;
}

}  // namespace testutil
