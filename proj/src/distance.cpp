#include "modtest/distance.hpp"

#include <algorithm>
#include <cmath>

#include "modtest/parallel.hpp"

namespace modtest {

DistanceMatrix pairwise_distances(const PooledSample& sample, int threads) {
  const int n = sample.n();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd& x = sample.data;
  parallel_for(n, threads, [&](int i) {
    for (int j = i + 1; j < n; ++j) d(i, j) = (x.col(i) - x.col(j)).norm();
  });
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  return DistanceMatrix{std::move(d)};
}

double select_tau(const DistanceMatrix& dmat, double q) {
  const int n = dmat.n();
  if (n < 2) throw InputError("need at least 2 observations to select tau");
  if (q <= 0.0 || q >= 1.0)
    throw InvalidConfig("tau quantile must lie in (0, 1)");

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) values.push_back(dmat.d(i, j));

  if (*std::max_element(values.begin(), values.end()) == 0.0)
    throw DegenerateDistances("all pairwise distances are zero");

  const auto m = values.size();
  // ceil(q*M), guarded against q*M landing a hair above an integer
  auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(m) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, m);
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

ConnectivityGraph connectivity(const DistanceMatrix& dmat, double tau) {
  if (!(tau > 0.0)) throw InvalidConfig("tau must be positive");
  const int n = dmat.n();
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && dmat.d(i, j) <= tau) a(i, j) = 1;
  return ConnectivityGraph{std::move(a), tau};
}

}  // namespace modtest
