#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "camp/dirichlet.hpp"
#include "camp/gibbs.hpp"
#include "camp/matrix.hpp"
#include "camp/trace.hpp"

namespace camp {

inline constexpr std::size_t kMaxOracleUsers = 8;

/// Every set partition of the users with its exact posterior probability
/// under DP(alpha, uniform base), and the exact posterior mean kernels.
struct ExactPosterior {
  struct Entry {
    std::vector<std::vector<std::size_t>> blocks;
    double probability = 0.0;
  };
  std::vector<Entry> partitions;
  std::vector<KernelEstimate> expected_theta;
  Matrix<double> co_cluster;  // P(u and v share a block)
};

/// Enumerates all set partitions (Bell(U) of them). Throws ConfigError above
/// kMaxOracleUsers users.
ExactPosterior enumerate_posterior(std::span<const TransitionCounts> counts,
                                   double alpha);

/// Calls fn(block_of_user) for every set partition as a restricted-growth
/// string.
template <class Fn>
void for_each_partition(std::size_t users, Fn&& fn) {
  if (users == 0) return;
  std::vector<std::size_t> rgs(users, 0);
  std::vector<std::size_t> max_prefix(users, 0);
  while (true) {
    fn(static_cast<const std::vector<std::size_t>&>(rgs));
    std::size_t i = users - 1;
    while (i > 0 && rgs[i] == max_prefix[i - 1] + 1) --i;
    if (i == 0) return;
    ++rgs[i];
    for (std::size_t j = i; j < users; ++j) {
      if (j > i) rgs[j] = 0;
      max_prefix[j] = std::max(max_prefix[j - 1], rgs[j]);
    }
  }
}

/// Fraction of samples in which each pair of users shares a cluster.
/// Throws ConfigError for an empty sample list.
Matrix<double> co_cluster_matrix(std::span<const ClusterAssignment> samples);

}  // namespace camp
