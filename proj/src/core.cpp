#include "modtest/core.hpp"

namespace modtest {

std::string to_string(Method m) {
  return m == Method::mod ? "mod" : "camod";
}

void TestConfig::validate() const {
  if (alpha <= 0.0 || alpha >= 1.0)
    throw InvalidConfig("alpha must lie in (0, 1)");
  if (tau) {
    if (!(*tau > 0.0)) throw InvalidConfig("explicit tau must be positive");
  } else if (tau_quantile <= 0.0 || tau_quantile >= 1.0) {
    throw InvalidConfig("tau quantile must lie in (0, 1)");
  }
  if (mc_outer < 1) throw InvalidConfig("mc_outer must be at least 1");
  if (mc_inner < 2) throw InvalidConfig("mc_inner must be at least 2");
  if (ridge < 0.0 || !std::isfinite(ridge))
    throw InvalidConfig("ridge must be finite and non-negative");
  if (threads < 0) throw InvalidConfig("threads must be non-negative");
}

namespace detail {

PooledSample make_pooled(const Eigen::MatrixXd& data, std::vector<int> codes,
                         int k) {
  if (k < 2) throw TooFewGroups("need at least 2 groups, got " +
                                std::to_string(k));
  if (!data.allFinite())
    throw NonFiniteData("data matrix contains NaN or infinite entries");

  std::vector<int> sizes(k, 0);
  for (int c : codes) ++sizes[c];
  for (int g = 0; g < k; ++g) {
    if (sizes[g] < 2)
      throw EmptyGroup("group " + std::to_string(g + 1) + " has " +
                       std::to_string(sizes[g]) +
                       " observation(s); need at least 2");
  }

  std::vector<std::vector<int>> members(k);
  for (int g = 0; g < k; ++g) members[g].reserve(sizes[g]);
  for (std::size_t i = 0; i < codes.size(); ++i)
    members[codes[i]].push_back(static_cast<int>(i));

  return PooledSample{data, std::move(codes), std::move(sizes),
                      std::move(members)};
}

}  // namespace detail
}  // namespace modtest
