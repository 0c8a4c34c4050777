#pragma once

#include "modtest/core.hpp"

namespace modtest {

/// Result of scanning candidate quantiles for the connectivity threshold.
/// objective[c] is the empirical surrogate
///   f^2(tau_c^2) / (xi_c (1 - xi_c) - sum_{k,l} gamma_k gamma_l p_kl)
/// with f a histogram density estimate of the pooled squared distances.
/// Candidates with a non-positive denominator get -infinity.
struct TauScan {
  std::vector<double> grid;
  std::vector<double> objective;
  double selected_quantile = 0.5;
  double selected_tau = 0.0;
  int selected_index = 0;
};

/// Evaluates the surrogate objective on a grid of quantiles in [0.05, 0.95]
/// and returns the argmax; ties go to the candidate closest to 0.5, then to
/// the smaller quantile. This scan is an opt-in diagnostic; the default
/// pipeline simply uses the median distance.
TauScan scan_tau(const PooledSample& sample, const std::vector<double>& grid);

namespace detail {
int select_best(const std::vector<double>& grid,
                const std::vector<double>& values);
}

}  // namespace modtest
