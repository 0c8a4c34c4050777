#pragma once

#include "modtest/core.hpp"

namespace modtest {

struct DistanceMatrix {
  Eigen::MatrixXd d;  // symmetric, zero diagonal

  int n() const { return static_cast<int>(d.rows()); }
};

/// Binary connectivity graph: a(i,j) = 1 when d(i,j) <= tau for i != j.
/// The diagonal is stored as 0 and excluded from every downstream sum.
struct ConnectivityGraph {
  Eigen::MatrixXi a;
  double tau = 0.0;

  int n() const { return static_cast<int>(a.rows()); }
};

/// Pairwise L2 distances between observation columns, each unordered pair
/// computed once with the plain sqrt-of-squares formula and mirrored.
DistanceMatrix pairwise_distances(const PooledSample& sample, int threads = 1);

/// q-th empirical quantile of the n(n-1)/2 off-diagonal distances, defined
/// as the ceil(q*M)-th smallest so the result is always an observed
/// distance. Throws DegenerateDistances when every pair is at distance 0.
double select_tau(const DistanceMatrix& dmat, double q = 0.5);

ConnectivityGraph connectivity(const DistanceMatrix& dmat, double tau);

}  // namespace modtest
