#include "modtest/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modtest/mod_test.hpp"

namespace modtest {
namespace {

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const auto m = sorted.size();
  auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(m) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, m);
  return sorted[rank - 1];
}

}  // namespace

namespace detail {

int select_best(const std::vector<double>& grid,
                const std::vector<double>& values) {
  int best = -1;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (!std::isfinite(values[c])) continue;
    if (best < 0 || values[c] > values[best]) {
      best = static_cast<int>(c);
    } else if (values[c] == values[best]) {
      const double dc = std::abs(grid[c] - 0.5);
      const double db = std::abs(grid[best] - 0.5);
      if (dc < db || (dc == db && grid[c] < grid[best]))
        best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace detail

TauScan scan_tau(const PooledSample& sample, const std::vector<double>& grid) {
  if (sample.n() < 20)
    throw InputError("threshold scan needs at least 20 observations");
  if (grid.empty()) throw InvalidConfig("candidate grid is empty");
  for (double xi : grid)
    if (xi < 0.05 || xi > 0.95)
      throw InvalidConfig("candidate quantiles must lie in [0.05, 0.95]");

  DistanceMatrix dmat = pairwise_distances(sample);
  const int n = sample.n();
  std::vector<double> squared;
  squared.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      squared.push_back(dmat.d(i, j) * dmat.d(i, j));
  std::vector<double> sorted = squared;
  std::sort(sorted.begin(), sorted.end());

  const double lo = sorted.front();
  const double hi = sorted.back();
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  const double m = static_cast<double>(sorted.size());
  const double width = 2.0 * iqr / std::cbrt(m);  // Freedman-Diaconis
  if (!(width > 0.0) || !(hi > lo))
    throw DegenerateDistances(
        "squared pairwise distances are too concentrated for a density "
        "estimate");
  const int bins = static_cast<int>(std::ceil((hi - lo) / width));
  std::vector<long> counts(bins, 0);
  for (double s : squared) {
    int bin = static_cast<int>((s - lo) / width);
    bin = std::clamp(bin, 0, bins - 1);
    ++counts[bin];
  }
  auto density_at = [&](double s) {
    int bin = static_cast<int>((s - lo) / width);
    bin = std::clamp(bin, 0, bins - 1);
    return static_cast<double>(counts[bin]) / (m * width);
  };

  TauScan scan;
  scan.grid = grid;
  scan.objective.resize(grid.size());
  std::vector<double> taus(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double tau = select_tau(dmat, grid[c]);
    taus[c] = tau;
    ConnectivityGraph graph = connectivity(dmat, tau);
    const double triple_avg =
        modtest::detail::diagnostics_core(graph, sample).triple_term.mean();
    const double xi = grid[c];
    const double denominator = xi * (1.0 - xi) - triple_avg;
    const double f = density_at(tau * tau);
    scan.objective[c] = denominator > 0.0
                            ? f * f / denominator
                            : -std::numeric_limits<double>::infinity();
  }

  const int best = detail::select_best(grid, scan.objective);
  if (best < 0)
    throw NonFiniteObjective(
        "the scan objective is undefined at every candidate quantile");
  scan.selected_index = best;
  scan.selected_quantile = grid[best];
  scan.selected_tau = taus[best];
  return scan;
}

}  // namespace modtest
