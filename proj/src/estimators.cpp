#include "modtest/estimators.hpp"

namespace modtest {

std::pair<Eigen::VectorXd, Eigen::VectorXd> within_between(
    const ConnectivityGraph& graph, const PooledSample& sample) {
  const int n = graph.n();
  if (n != sample.n())
    throw InputError("graph and sample dimensions do not match");
  Eigen::VectorXd p_bet(n), p_in(n);
  for (int i = 0; i < n; ++i) {
    const int g = sample.group[i];
    long within = 0, between = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (sample.group[j] == g)
        within += graph.a(i, j);
      else
        between += graph.a(i, j);
    }
    const int ng = sample.group_sizes[g];
    p_in(i) = static_cast<double>(within) / (ng - 1);
    p_bet(i) = static_cast<double>(between) / (n - ng);
  }
  return {std::move(p_bet), std::move(p_in)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> p0_p12_per_i(
    const ConnectivityGraph& graph) {
  const int n = graph.n();
  if (n < 3) throw InputError("need at least 3 observations");
  Eigen::VectorXd p0_i(n), p12_i(n);
  for (int i = 0; i < n; ++i) {
    long degree = 0;
    for (int j = 0; j < n; ++j) degree += graph.a(i, j);
    const double p0 = static_cast<double>(degree) / (n - 1);
    double s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double delta = graph.a(i, j) - p0;
      s1 += delta;
      s2 += delta * delta;
    }
    p0_i(i) = p0;
    p12_i(i) = (s1 * s1 - s2) /
               (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  }
  return {std::move(p0_i), std::move(p12_i)};
}

std::tuple<double, double, double> p0_p12_global(
    const ConnectivityGraph& graph) {
  const int n = graph.n();
  if (n < 3) throw InputError("need at least 3 observations");
  long total = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) total += graph.a(i, j);
  const double p0 =
      static_cast<double>(total) / (static_cast<double>(n) * (n - 1));

  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double delta = graph.a(i, j) - p0;
      s1 += delta;
      s2 += delta * delta;
    }
    sum += s1 * s1 - s2;
  }
  const double p12 = sum / (static_cast<double>(n) * (n - 1) * (n - 2));
  return {p0, p12, p0 * (1.0 - p0)};
}

ConnectionProbabilities connection_probabilities(const ConnectivityGraph& graph,
                                                 const PooledSample& sample) {
  ConnectionProbabilities out;
  std::tie(out.p_bet, out.p_in) = within_between(graph, sample);
  std::tie(out.p0_i, out.p12_i) = p0_p12_per_i(graph);
  std::tie(out.p0, out.p12, out.p22) = p0_p12_global(graph);
  return out;
}

}  // namespace modtest
