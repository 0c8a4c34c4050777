#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace modtest {

// Error taxonomy. InputError covers malformed data, configs and files;
// DegenerateError covers inputs on which the statistic is undefined
// (constant graphs, vanishing variance terms); NumericalError covers
// factorization failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class EmptyGroup : public InputError {
 public:
  using InputError::InputError;
};

class NonFiniteData : public InputError {
 public:
  using InputError::InputError;
};

class LabelMismatch : public InputError {
 public:
  using InputError::InputError;
};

class TooFewGroups : public InputError {
 public:
  using InputError::InputError;
};

class InvalidConfig : public InputError {
 public:
  using InputError::InputError;
};

class InvalidSpec : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class MixedTypeColumn : public InputError {
 public:
  using InputError::InputError;
};

class SingularDesign : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateDistances : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class DegenerateVariance : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class NonFiniteObjective : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class EigenFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class Method { mod, camod };

std::string to_string(Method m);

/// Pooled observations from K samples. Columns of `data` are observations,
/// rows are features. `group[i]` is the 0-based group index of observation i,
/// assigned in order of first appearance of the raw labels.
struct PooledSample {
  Eigen::MatrixXd data;                   // p x n
  std::vector<int> group;                 // size n, values in [0, k)
  std::vector<int> group_sizes;           // size k
  std::vector<std::vector<int>> members;  // observation indices per group

  int n() const { return static_cast<int>(data.cols()); }
  int p() const { return static_cast<int>(data.rows()); }
  int k() const { return static_cast<int>(group_sizes.size()); }
};

struct TestConfig {
  std::optional<double> tau;  // explicit threshold; overrides tau_quantile
  double tau_quantile = 0.5;
  double alpha = 0.05;
  int mc_outer = 100;  // B replicates of the calibration quantile
  int mc_inner = 200;  // N max-draws per replicate
  std::uint64_t seed = 0;
  double ridge = 1e-10;  // relative eigenvalue floor for inverse square roots
  bool diagnostics = false;
  int threads = 1;

  void validate() const;
};

struct TestReport {
  std::string method;
  double statistic = 0.0;
  std::optional<double> centered_statistic;  // camod only
  double p_value = 1.0;
  std::optional<double> p_mod_replicated;  // mod only
  double critical_value = 0.0;
  bool reject = false;
  double alpha = 0.05;
  double tau = 0.0;
  std::optional<double> tau_quantile;
  double p0_hat = 0.0;
  double p12_hat = 0.0;
  std::optional<Eigen::VectorXd> nu_hat;
  int n = 0;
  int p = 0;
  int k = 0;
  std::vector<int> group_sizes;
  bool regression = false;
  std::optional<int> regression_d;
  bool pd_clipped = false;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

namespace detail {
PooledSample make_pooled(const Eigen::MatrixXd& data, std::vector<int> codes,
                         int k);
}

/// Validates a raw (data, labels) pair and re-encodes the labels to
/// contiguous group indices by first appearance. Requires at least two
/// groups, at least two observations per group and finite entries.
template <typename Label>
PooledSample validate_sample(const Eigen::MatrixXd& data,
                             const std::vector<Label>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != data.cols()) {
    throw LabelMismatch("label count (" + std::to_string(labels.size()) +
                        ") does not match observation count (" +
                        std::to_string(data.cols()) + ")");
  }
  std::map<Label, int> code_of;
  std::vector<int> codes(labels.size());
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = code_of.try_emplace(labels[i], next);
    if (inserted) ++next;
    codes[i] = it->second;
  }
  return detail::make_pooled(data, std::move(codes), next);
}

}  // namespace modtest
