#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "modtest/camod.hpp"
#include "modtest/mod_test.hpp"
#include "modtest/simbench.hpp"

using namespace modtest;

TEST_CASE("standardized differences on the 4-point toy") {
  auto sample = testutil::toy_sample();
  TestConfig config;
  config.tau = 1.0;
  Pipeline pipe = build_pipeline(sample, config);
  // variance term (1/2 + 1) * (2/9 + 1/9) = 1/2 for every observation
  for (int i = 0; i < 4; ++i) {
    CHECK(pipe.components.variance_terms(i) == doctest::Approx(0.5));
    CHECK(std::abs(pipe.components.t(i)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  CHECK(pipe.components.t(0) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(pipe.components.statistic() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("identical observations abort with a degenerate variance") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 8);
  auto sample = testutil::make_sample(x, testutil::half_labels(8));
  TestConfig config;
  config.tau = 1.0;  // complete graph
  CHECK_THROWS_AS(mod_test(sample, config), DegenerateVariance);
}

TEST_CASE("a constant connectivity row contributes zero, not an error") {
  // observations 3 and 6 sit far from everything and are isolated at tau=1;
  // their within and between probabilities are both exactly zero
  Eigen::MatrixXd x(1, 6);
  x << 0.0, 0.5, 100.0, 10.0, 10.4, -100.0;
  auto sample = testutil::make_sample(x, {1, 1, 1, 2, 2, 2});
  TestConfig config;
  config.tau = 1.0;
  Pipeline pipe = build_pipeline(sample, config);
  CHECK(pipe.components.t(2) == 0.0);
  CHECK(pipe.components.t(5) == 0.0);
  CHECK(pipe.components.variance_terms(2) == 0.0);
  CHECK(pipe.components.statistic() > 0.0);
  CHECK(std::isfinite(pipe.components.statistic()));
}

TEST_CASE("zero numerator gives a zero statistic") {
  auto sample = testutil::toy_sample();
  ConnectionProbabilities probs;
  probs.p_bet = probs.p_in = Eigen::VectorXd::Constant(4, 0.4);
  probs.p0_i = Eigen::VectorXd::Constant(4, 0.4);
  probs.p12_i = Eigen::VectorXd::Constant(4, -0.05);
  auto components = mod_components(probs, sample);
  CHECK(components.statistic() == 0.0);
}

TEST_CASE("calibration extremes") {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(6, 6);
  TestConfig config;
  config.mc_outer = 20;
  config.mc_inner = 100;
  config.seed = 5;

  SUBCASE("statistic 0 retains") {
    auto cal = mod_calibrate(0.0, sigma, config);
    CHECK(cal.p_pooled == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(cal.p_mod == 0.0);
  }
  SUBCASE("a huge statistic rejects") {
    auto cal = mod_calibrate(1e9, sigma, config);
    CHECK(cal.p_pooled == doctest::Approx(1.0 / (20.0 * 100.0 + 1.0)));
    CHECK(cal.p_mod == 1.0);
  }
}

TEST_CASE("calibration quantiles sit near the analytic max-chi-square") {
  // for independent coordinates the (1-alpha) quantile of max_i Z_i^2 is
  // the chi2(1) quantile at (1-alpha)^(1/n); for n = 6, alpha = 0.05 that
  // is 6.922362
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(6, 6);
  TestConfig config;
  config.mc_outer = 40;
  config.mc_inner = 2000;
  config.seed = 11;
  auto cal = mod_calibrate(1.0, sigma, config);
  CHECK(cal.critical_value == doctest::Approx(6.922362).epsilon(0.05));
}

TEST_CASE("mod_test report fields are coherent") {
  Eigen::MatrixXd x = testutil::gaussian_matrix(5, 30, 17);
  auto sample = testutil::make_sample(x, testutil::half_labels(30));
  TestConfig config;
  config.mc_outer = 10;
  config.mc_inner = 50;
  config.seed = 3;
  TestReport report = mod_test(sample, config);
  CHECK(report.method == "mod");
  CHECK(report.p_value >= 0.0);
  CHECK(report.p_value <= 1.0);
  CHECK(report.p_mod_replicated.has_value());
  CHECK(report.statistic >= 0.0);
  CHECK(report.n == 30);
  CHECK(report.p == 5);
  CHECK(report.k == 2);
  CHECK(report.reject == (report.p_value <= config.alpha));
  CHECK_FALSE(report.nu_hat.has_value());
}

TEST_CASE("mod_test is invariant under rotation and translation") {
  const int n = 40, p = 10;
  Eigen::MatrixXd x = testutil::gaussian_matrix(p, n, 23);
  auto labels = testutil::half_labels(n);
  TestConfig config;
  config.mc_outer = 20;
  config.mc_inner = 60;
  config.seed = 9;

  TestReport base = mod_test(testutil::make_sample(x, labels), config);
  Eigen::MatrixXd q = testutil::random_orthogonal(p, 24);
  Eigen::MatrixXd moved =
      (q * x).colwise() + Eigen::VectorXd::Constant(p, -3.25);
  TestReport other = mod_test(testutil::make_sample(moved, labels), config);

  CHECK(std::abs(base.statistic - other.statistic) <= 1e-10);
  CHECK(base.p_value == other.p_value);
  CHECK(base.p_mod_replicated == other.p_mod_replicated);
  CHECK(base.tau == doctest::Approx(other.tau).epsilon(1e-12));
}

TEST_CASE("statistic is invariant under relabeling and in-group reordering") {
  const int n = 24, p = 4;
  Eigen::MatrixXd x = testutil::gaussian_matrix(p, n, 41);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i < 10 ? 1 : 2;
  TestConfig config;
  config.mc_outer = 5;
  config.mc_inner = 40;
  TestReport base = mod_test(testutil::make_sample(x, labels), config);

  SUBCASE("swapping label names changes nothing") {
    std::vector<int> swapped(n);
    for (int i = 0; i < n; ++i) swapped[i] = labels[i] == 1 ? 7 : -2;
    TestReport other = mod_test(testutil::make_sample(x, swapped), config);
    CHECK(other.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
    CHECK(other.p_value == base.p_value);
  }
  SUBCASE("reordering observations within groups changes nothing") {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.begin() + 10, make_engine(1, 1));
    std::shuffle(order.begin() + 10, order.end(), make_engine(1, 2));
    Eigen::MatrixXd shuffled(p, n);
    for (int i = 0; i < n; ++i) shuffled.col(i) = x.col(order[i]);
    TestReport other = mod_test(testutil::make_sample(shuffled, labels), config);
    CHECK(other.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
  }
}

TEST_CASE("rejection rate grows with the mean shift") {
  // three shift levels at fixed n, p; monotone within Monte Carlo error
  const int reps = 80;
  double rates[3];
  int level = 0;
  for (double scale : {0.0, 1.0, 2.0}) {
    ScenarioSpec spec;
    spec.setting = Setting::IA;
    spec.scenario = scale == 0.0 ? Case::null_case : Case::mean_shift;
    spec.n = 99;
    spec.p = 50;
    if (scale > 0.0) spec.signal = scale / std::sqrt(50.0);
    spec.replications = reps;
    spec.seed = 505;
    TestConfig config;
    config.mc_outer = 50;
    config.mc_inner = 100;
    auto table = run_experiment(spec, {Method::mod}, config);
    REQUIRE(table.rows.size() == 1);
    REQUIRE(table.rows[0].error.empty());
    rates[level++] = table.rows[0].rejection_rate;
  }
  CHECK(rates[0] <= rates[1] + 0.05);
  CHECK(rates[1] <= rates[2] + 0.05);
  CHECK(rates[2] > 0.5);  // the largest shift should be clearly detected
}

TEST_CASE("nu vanishes when every group pair connects at the same rate") {
  // 6 observations, two groups; edges chosen so every ordered group pair
  // has frequency exactly 1/3
  Eigen::MatrixXd x = testutil::gaussian_matrix(1, 6, 2);
  auto sample = testutil::make_sample(x, {1, 1, 1, 2, 2, 2});
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(6, 6);
  auto link = [&](int i, int j) { a(i, j) = a(j, i) = 1; };
  link(0, 1);  // within group 1
  link(3, 4);  // within group 2
  link(0, 3);
  link(1, 4);
  link(2, 5);  // three cross edges
  const ConnectivityGraph graph{a, 1.0};

  PowerDiagnostics diag = power_diagnostics(graph, sample);
  CHECK(diag.p_kl_hat(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(diag.p_kl_hat(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(diag.p_kl_hat(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(diag.nu_hat.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("nu is tiny when the groups are copies of one point set") {
  const int m = 30;
  Eigen::MatrixXd half = testutil::gaussian_matrix(6, m, 19);
  Eigen::MatrixXd x(6, 2 * m);
  x << half, half;
  auto sample = testutil::make_sample(x, testutil::half_labels(2 * m));
  DistanceMatrix dmat = pairwise_distances(sample);
  ConnectivityGraph graph = connectivity(dmat, select_tau(dmat, 0.6));
  PowerDiagnostics diag = power_diagnostics(graph, sample);
  CHECK(diag.nu_hat.maxCoeff() < 0.01);
}

TEST_CASE("nu is positive on the separated toy clusters") {
  auto sample = testutil::toy_sample();
  ConnectivityGraph graph = connectivity(pairwise_distances(sample), 1.0);
  PowerDiagnostics diag = power_diagnostics(graph, sample);
  for (int i = 0; i < 4; ++i)
    CHECK(diag.nu_hat(i) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(diag.omega_hat.allFinite());
}

TEST_CASE("nu permutes with the observations") {
  const int n = 20;
  Eigen::MatrixXd x = testutil::gaussian_matrix(3, n, 8);
  x.rightCols(n / 2).array() += 0.8;  // give the diagnostics a signal
  auto labels = testutil::half_labels(n);
  auto sample = testutil::make_sample(x, labels);
  DistanceMatrix dmat = pairwise_distances(sample);
  const double tau = select_tau(dmat, 0.5);
  PowerDiagnostics diag =
      power_diagnostics(connectivity(dmat, tau), sample);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), make_engine(14, 0));
  Eigen::MatrixXd px(3, n);
  std::vector<int> plabels(n);
  for (int i = 0; i < n; ++i) {
    px.col(i) = x.col(perm[i]);
    plabels[i] = labels[perm[i]];
  }
  auto psample = testutil::make_sample(px, plabels);
  PowerDiagnostics pdiag = power_diagnostics(
      connectivity(pairwise_distances(psample), tau), psample);
  for (int i = 0; i < n; ++i)
    CHECK(pdiag.nu_hat(i) == doctest::Approx(diag.nu_hat(perm[i])).epsilon(1e-10));
}
