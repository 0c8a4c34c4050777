#include <doctest.h>

#include "helpers.hpp"
#include "modtest/mod_test.hpp"
#include "modtest/regression.hpp"

using namespace modtest;

namespace {

RegressionSample gaussian_regression(int p, std::vector<int> sizes, int d,
                                     std::uint64_t seed) {
  RegressionSample sample;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    sample.responses.push_back(
        testutil::gaussian_matrix(p, sizes[g], seed + 10 * g));
    sample.covariates.push_back(
        testutil::gaussian_matrix(sizes[g], d, seed + 10 * g + 5));
  }
  return sample;
}

}  // namespace

TEST_CASE("an all-ones covariate column centers each feature row") {
  Eigen::MatrixXd x(1, 3);
  x << 1, 2, 3;
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(3, 1);
  Eigen::MatrixXd residuals = ols_residuals(x, w);
  CHECK(residuals(0, 0) == doctest::Approx(-1.0));
  CHECK(residuals(0, 1) == doctest::Approx(0.0));
  CHECK(residuals(0, 2) == doctest::Approx(1.0));
}

TEST_CASE("a perfect linear fit leaves zero residuals") {
  Eigen::MatrixXd w = testutil::gaussian_matrix(10, 2, 3);
  Eigen::MatrixXd beta = testutil::gaussian_matrix(4, 2, 4);
  Eigen::MatrixXd x = beta * w.transpose();
  CHECK(ols_residuals(x, w).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("residuals are orthogonal to the covariates") {
  Eigen::MatrixXd x = testutil::gaussian_matrix(6, 25, 8);
  Eigen::MatrixXd w = testutil::gaussian_matrix(25, 3, 9);
  Eigen::MatrixXd residuals = ols_residuals(x, w);
  const double scale = x.cwiseAbs().maxCoeff();
  CHECK((residuals * w).cwiseAbs().maxCoeff() <= 1e-8 * scale);
}

TEST_CASE("a rank-deficient design is rejected") {
  Eigen::MatrixXd x = testutil::gaussian_matrix(3, 12, 10);
  Eigen::MatrixXd w(12, 2);
  w.col(0) = testutil::gaussian_matrix(12, 1, 11);
  w.col(1) = 2.0 * w.col(0);  // collinear
  CHECK_THROWS_AS(ols_residuals(x, w), SingularDesign);
}

TEST_CASE("residuals depend only on the covariate column space") {
  Eigen::MatrixXd x = testutil::gaussian_matrix(5, 20, 12);
  Eigen::MatrixXd w = testutil::gaussian_matrix(20, 3, 13);
  Eigen::MatrixXd a = testutil::gaussian_matrix(3, 3, 14);  // invertible w.h.p.
  Eigen::MatrixXd base = ols_residuals(x, w);
  Eigen::MatrixXd changed = ols_residuals(x, w * a);
  CHECK((base - changed).cwiseAbs().maxCoeff() <=
        1e-8 * base.cwiseAbs().maxCoeff());
}

TEST_CASE("regression sample validation") {
  RegressionSample sample = gaussian_regression(4, {10, 12}, 2, 21);
  CHECK_NOTHROW(sample.validate());

  SUBCASE("mismatched feature counts") {
    sample.responses[1] = testutil::gaussian_matrix(5, 12, 1);
    CHECK_THROWS_AS(sample.validate(), InputError);
  }
  SUBCASE("too few observations for the covariates") {
    sample.responses[0] = testutil::gaussian_matrix(4, 2, 1);
    sample.covariates[0] = testutil::gaussian_matrix(2, 2, 2);
    CHECK_THROWS_AS(sample.validate(), InputError);
  }
  SUBCASE("single group") {
    sample.responses.pop_back();
    sample.covariates.pop_back();
    CHECK_THROWS_AS(sample.validate(), TooFewGroups);
  }
}

TEST_CASE("pooled residuals keep the group layout") {
  RegressionSample sample = gaussian_regression(3, {8, 11}, 2, 33);
  PooledSample pooled = pool_residuals(sample);
  CHECK(pooled.n() == 19);
  CHECK(pooled.p() == 3);
  CHECK(pooled.group_sizes == std::vector<int>{8, 11});
  CHECK(pooled.group[0] == 0);
  CHECK(pooled.group[18] == 1);
}

TEST_CASE("adding a linear-in-W signal does not change the report") {
  RegressionSample sample = gaussian_regression(4, {12, 14}, 2, 44);
  TestConfig config;
  config.mc_outer = 10;
  config.mc_inner = 40;
  config.seed = 6;
  TestReport base = regression_test(sample, config, Method::camod);

  RegressionSample shifted = sample;
  Eigen::MatrixXd beta = testutil::gaussian_matrix(4, 2, 45);
  for (int g = 0; g < shifted.k(); ++g)
    shifted.responses[g] += beta * shifted.covariates[g].transpose();
  TestReport other = regression_test(shifted, config, Method::camod);

  CHECK(base.statistic == doctest::Approx(other.statistic).epsilon(1e-8));
  CHECK(base.tau == doctest::Approx(other.tau).epsilon(1e-10));
  CHECK(base.reject == other.reject);
}

TEST_CASE("with an all-ones covariate the test reduces to centering") {
  const int p = 4;
  std::vector<int> sizes{9, 13};
  TestConfig config;
  config.mc_outer = 8;
  config.mc_inner = 40;
  config.seed = 2;

  RegressionSample sample;
  std::vector<int> labels;
  Eigen::MatrixXd centered(p, 22);
  int offset = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    Eigen::MatrixXd x = testutil::gaussian_matrix(p, sizes[g], 50 + g);
    sample.responses.push_back(x);
    sample.covariates.push_back(Eigen::MatrixXd::Ones(sizes[g], 1));
    centered.middleCols(offset, sizes[g]) =
        x.colwise() - x.rowwise().mean();
    labels.insert(labels.end(), sizes[g], static_cast<int>(g));
    offset += sizes[g];
  }

  TestReport reg = regression_test(sample, config, Method::mod);
  TestReport plain = mod_test(testutil::make_sample(centered, labels), config);
  CHECK(reg.statistic == doctest::Approx(plain.statistic).epsilon(1e-10));
  CHECK(reg.tau == doctest::Approx(plain.tau).epsilon(1e-12));
  CHECK(reg.regression);
  CHECK(reg.regression_d == 1);
  CHECK_FALSE(plain.regression);
}

TEST_CASE("a warning is attached when p log(n)/n is large") {
  RegressionSample sample = gaussian_regression(60, {10, 10}, 1, 71);
  TestConfig config;
  config.mc_outer = 5;
  config.mc_inner = 30;
  TestReport report = regression_test(sample, config, Method::camod);
  REQUIRE_FALSE(report.warnings.empty());
  CHECK(report.warnings[0].find("p*log(n)/n") != std::string::npos);
}
