#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "camp/dirichlet.hpp"
#include "camp/engine.hpp"
#include "camp/matrix.hpp"
#include "camp/trace.hpp"

namespace camp {

/// θ̂^u_ij = eta_i + Σ_v gamma(v, i) · n^v_ij / n^v_i, terms with n^v_i = 0
/// dropped.
struct SimilarityWeights {
  std::vector<double> eta;  // per location
  Matrix<double> gamma;     // users × locations

  /// Rebuilds the kernel from the weights and every user's counts.
  KernelEstimate reconstruct(std::span<const TransitionCounts> counts) const;
  /// Σ_i gamma(v, i).
  std::vector<double> aggregate() const;
};

inline constexpr std::size_t kDefaultChainBudget = 1'000'000;

/// Exact expansion of θ̂ over every chain of sampled clusters
/// (c_1, ..., c_K), one cluster per round, computed from the sampled
/// partitions alone and not from the stored base measure. Precomputes the
/// round weights once so weights() is cheap for every user.
class ChainExpansion {
 public:
  /// Throws BudgetError when the number of chains exceeds `chain_budget`.
  explicit ChainExpansion(const CampModel& model,
                          std::size_t chain_budget = kDefaultChainBudget);

  std::size_t num_chains() const { return num_chains_; }
  SimilarityWeights weights(std::size_t user) const;

 private:
  struct Node;  // a distinct cluster sampled in some round
  const CampModel* model_;
  std::size_t num_chains_ = 0;
  std::vector<std::vector<std::vector<std::size_t>>> clusters_;  // [k][c]
  // For final-round cluster c and each (round k, cluster c'): Σ over chains
  // ending at c passing through c' at round k of W/(L+N_i), per location.
  std::vector<std::vector<std::vector<std::vector<double>>>> through_;
  // For final-round cluster c: Σ over chains ending at c of W/(L+N_i).
  std::vector<std::vector<double>> eta_;
};

SimilarityWeights lemma1_weights(const CampModel& model, std::size_t user,
                                 std::size_t chain_budget = kDefaultChainBudget);

/// A user's observed stays at one location.
struct StaySamples {
  std::size_t user;
  std::vector<double> stays;
};

/// Σ_v z·w_v·mean(stays_v) over users with at least one stay, z normalizing
/// those weights to 1. std::nullopt when no weighted user has a stay.
std::optional<double> estimate_staying_time(std::span<const double> weights,
                                            std::span<const StaySamples> stays);

/// Staying-time estimate for `user` at location `at` using the user's
/// similarity weights column gamma(·, at) and every user's full stays.
std::optional<double> estimate_staying_time(const SimilarityWeights& weights,
                                            const TraceSet& traces,
                                            Location at);

/// Per-user observed stays at `at` among the first `visible[v]` visits.
std::vector<StaySamples> stays_at(const TraceSet& traces, Location at,
                                  std::span<const std::size_t> visible = {});

}  // namespace camp
