#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "camp/dirichlet.hpp"
#include "camp/trace.hpp"

namespace camp {

using ClusterId = std::int32_t;

/// Partition of users into clusters with pooled transition counts.
class ClusterAssignment {
 public:
  struct Cluster {
    std::vector<std::size_t> members;  // ascending
    TransitionCounts pooled;
  };

  ClusterAssignment() = default;
  /// Builds clusters from a label per user (labels may be arbitrary ids).
  ClusterAssignment(std::vector<ClusterId> labels,
                    std::span<const TransitionCounts> counts);

  /// All users in cluster 0.
  static ClusterAssignment single_cluster(
      std::span<const TransitionCounts> counts);

  std::size_t num_users() const { return labels_.size(); }
  std::size_t num_clusters() const { return clusters_.size(); }
  ClusterId cluster_of(std::size_t user) const { return labels_[user]; }
  const std::vector<ClusterId>& labels() const { return labels_; }
  const std::map<ClusterId, Cluster>& clusters() const { return clusters_; }
  const Cluster& cluster(ClusterId id) const { return clusters_.at(id); }

  /// Members of each cluster, clusters ordered by smallest member.
  std::vector<std::vector<std::size_t>> blocks() const;

  /// Takes `user` out of its cluster (deleting the cluster if it empties);
  /// the user is left unassigned until insert() or open().
  void remove(std::size_t user, const TransitionCounts& counts);
  void insert(std::size_t user, ClusterId id, const TransitionCounts& counts);
  /// Puts `user` alone in a fresh cluster and returns its id.
  ClusterId open(std::size_t user, const TransitionCounts& counts);

  bool is_assigned(std::size_t user) const { return labels_[user] >= 0; }

  /// Checks the partition covers all users exactly once, has no empty
  /// clusters and pooled counts equal member sums.
  bool is_consistent(std::span<const TransitionCounts> counts) const;

 private:
  std::vector<ClusterId> labels_;
  std::map<ClusterId, Cluster> clusters_;
  ClusterId next_id_ = 0;
};

struct GibbsConfig {
  double alpha = 1.0;
  MixtureBase base;
  int sweeps = 30;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless alpha > 0, sweeps >= 1 and the base is set.
  void validate(std::size_t alphabet_size) const;
};

/// Normalized CRP-times-likelihood probabilities for one unassigned user.
struct CrpWeights {
  double new_cluster = 0.0;
  std::vector<std::pair<ClusterId, double>> existing;
};

/// Conditional assignment probabilities for `user` (which must be
/// unassigned in `others`) computed directly from the definition: joining
/// cluster c is weighted by n_{c,-u} times the marginal of the user's data
/// under the base conditioned on c's pooled counts; a new cluster by alpha
/// times the marginal under the base.
CrpWeights crp_step_weights(std::size_t user,
                            const TransitionCounts& user_counts,
                            const ClusterAssignment& others,
                            const GibbsConfig& config);

/// One collapsed Gibbs chain: all users start in one cluster, then `sweeps`
/// passes in user order, each user resampled from its conditional.
/// Deterministic given the seed.
ClusterAssignment gibbs_sample(std::span<const TransitionCounts> counts,
                               const GibbsConfig& config);
ClusterAssignment gibbs_sample(const TraceSet& traces,
                               const GibbsConfig& config);

/// `batch` independent chains with seeds seed + b, b = 0..batch-1. Result
/// order is by b regardless of `threads`.
std::vector<ClusterAssignment> draw_batch(
    std::span<const TransitionCounts> counts, const GibbsConfig& config,
    std::size_t batch, unsigned threads = 1);

}  // namespace camp
