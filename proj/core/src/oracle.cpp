#include "camp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "camp/errors.hpp"

namespace camp {

ExactPosterior enumerate_posterior(std::span<const TransitionCounts> counts, double alpha) {
  const std::size_t U = counts.size();
  if (U == 0) throw ConfigError("the exact posterior needs at least one user");
  if (U > kMaxOracleUsers) {
    throw ConfigError("exact enumeration is limited to " + std::to_string(kMaxOracleUsers) +
                      " users, got " + std::to_string(U));
  }
  if (!(alpha > 0.0)) throw ConfigError("DP concentration must be positive");
  const std::size_t L = counts.front().size();
  const PseudoCounts uniform(L);

  ExactPosterior out;
  std::vector<double> log_weights;
  for_each_partition(U, [&](const std::vector<std::size_t>& rgs) {
    std::size_t blocks = 0;
    for (std::size_t b : rgs) blocks = std::max(blocks, b + 1);
    ExactPosterior::Entry entry;
    entry.blocks.resize(blocks);
    for (std::size_t u = 0; u < U; ++u) entry.blocks[rgs[u]].push_back(u);
    double log_w = static_cast<double>(blocks) * std::log(alpha);
    for (const auto& block : entry.blocks) {
      TransitionCounts pooled(L);
      for (std::size_t u : block) pooled += counts[u];
      log_w += std::lgamma(static_cast<double>(block.size())) + log_marginal(pooled, uniform);
    }
    out.partitions.push_back(std::move(entry));
    log_weights.push_back(log_w);
  });
  const double norm = log_sum_exp(log_weights);
  for (std::size_t p = 0; p < out.partitions.size(); ++p) {
    out.partitions[p].probability = std::exp(log_weights[p] - norm);
  }

  std::vector<Matrix<double>> theta(U, Matrix<double>(L, L, 0.0));
  out.co_cluster = Matrix<double>(U, U, 0.0);
  const auto base = MixtureBase::uniform(L);
  for (const auto& entry : out.partitions) {
    for (const auto& block : entry.blocks) {
      TransitionCounts pooled(L);
      for (std::size_t u : block) pooled += counts[u];
      const auto mean = posterior_mean(pooled, base);
      for (std::size_t u : block) {
        for (std::size_t i = 0; i < L; ++i) {
          for (std::size_t j = 0; j < L; ++j) theta[u](i, j) += entry.probability * mean(i, j);
        }
        for (std::size_t v : block) out.co_cluster(u, v) += entry.probability;
      }
    }
  }
  for (auto& m : theta) out.expected_theta.emplace_back(std::move(m));
  return out;
}

Matrix<double> co_cluster_matrix(std::span<const ClusterAssignment> samples) {
  if (samples.empty()) throw ConfigError("co-clustering needs at least one sample");
  const std::size_t U = samples.front().num_users();
  Matrix<double> out(U, U, 0.0);
  for (const auto& sample : samples) {
    for (const auto& [id, cluster] : sample.clusters()) {
      for (std::size_t u : cluster.members) {
        for (std::size_t v : cluster.members) out(u, v) += 1.0;
      }
    }
  }
  const double n = static_cast<double>(samples.size());
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t v = 0; v < U; ++v) out(u, v) /= n;
  }
  return out;
}

}  // namespace camp
