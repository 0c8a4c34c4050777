#pragma once

#include "modtest/core.hpp"
#include "modtest/distance.hpp"

namespace modtest {

/// Per-observation and pooled connection-probability estimates.
///
/// For observation i with group g, p_bet[i] is the fraction of connected
/// pairs (i, j) over observations j outside group g, and p_in[i] the
/// fraction over the other members of g. p0_i[i] is the per-observation
/// connection frequency over all j != i and p12_i[i] the product-moment
/// estimate built from residuals a(i,j) - p0_i[i]. The globals p0, p12
/// pool over all observations; p22 = p0 * (1 - p0).
struct ConnectionProbabilities {
  Eigen::VectorXd p_bet;
  Eigen::VectorXd p_in;
  Eigen::VectorXd p0_i;
  Eigen::VectorXd p12_i;
  double p0 = 0.0;
  double p12 = 0.0;
  double p22 = 0.0;
};

std::pair<Eigen::VectorXd, Eigen::VectorXd> within_between(
    const ConnectivityGraph& graph, const PooledSample& sample);

std::pair<Eigen::VectorXd, Eigen::VectorXd> p0_p12_per_i(
    const ConnectivityGraph& graph);

/// Pooled estimates (p0, p12, p22). The triple sum behind p12 has exactly
/// n(n-1)(n-2) terms and is evaluated through the per-row closed form
/// (sum delta)^2 - sum delta^2, which reduces the cost to O(n^2).
std::tuple<double, double, double> p0_p12_global(const ConnectivityGraph& graph);

ConnectionProbabilities connection_probabilities(const ConnectivityGraph& graph,
                                                 const PooledSample& sample);

}  // namespace modtest
