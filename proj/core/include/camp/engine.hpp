#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "camp/dirichlet.hpp"
#include "camp/gibbs.hpp"
#include "camp/trace.hpp"

namespace camp {

struct CampConfig {
  int iterations = 3;  // K
  int samples = 8;     // B
  int sweeps = 30;     // M
  std::uint64_t seed = 0;
  PruneLimits prune;
  unsigned threads = 1;

  void validate() const;
};

/// A fitted CAMP model: the adapted base measure and concentration, every
/// round of sampled partitions, and the per-user kernel estimates.
struct CampModel {
  std::size_t alphabet_size = 0;
  std::vector<std::string> users;
  std::vector<TransitionCounts> counts;
  MixtureBase base;    // base measure used for the final round
  double alpha = 1.0;  // concentration used for the final round
  /// rounds[k] holds the B partitions drawn in round k+1; the last entry is
  /// the final round used for estimation.
  std::vector<std::vector<ClusterAssignment>> rounds;
  std::vector<double> alpha_history;
  std::vector<KernelEstimate> theta;

  std::size_t num_users() const { return users.size(); }
  const std::vector<ClusterAssignment>& final_samples() const {
    return rounds.back();
  }
  /// Throws DataError for an unknown id.
  std::size_t user_index(const std::string& user_id) const;
};

/// G' = Σ_b Σ_{c in sample b} |c| / (B·U) · condition(G, pooled counts of c),
/// then pruned.
MixtureBase update_base(const MixtureBase& base,
                        std::span<const ClusterAssignment> samples,
                        std::span<const TransitionCounts> counts,
                        const PruneLimits& limits);

inline constexpr double kAlphaMin = 1e-6;
inline constexpr double kAlphaMax = 1e6;

/// Solves Σ_{i=1..U} α/(α+i−1) = mean_clusters by bisection on
/// [kAlphaMin, kAlphaMax], clamping outside (1, U).
double update_alpha(double mean_clusters, std::size_t num_users);
double update_alpha(std::span<const ClusterAssignment> samples,
                    std::size_t num_users);

/// Expected number of CRP clusters among `num_users` customers.
double expected_clusters(double alpha, std::size_t num_users);

CampModel fit(std::span<const TransitionCounts> counts,
              std::vector<std::string> users, const CampConfig& config);
CampModel fit(const TraceSet& traces, const CampConfig& config);

/// (1/B) Σ_b posterior_mean(pooled counts of u's cluster in sample b, base).
KernelEstimate estimate_theta(const CampModel& model, std::size_t user);

}  // namespace camp
