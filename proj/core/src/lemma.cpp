#include "camp/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "camp/errors.hpp"

namespace camp {

KernelEstimate SimilarityWeights::reconstruct(
    std::span<const TransitionCounts> counts) const {
  const std::size_t L = eta.size();
  Matrix<double> theta(L, L, 0.0);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) theta(i, j) = eta[i];
    for (std::size_t v = 0; v < counts.size(); ++v) {
      const int n_i = counts[v].row_sum(i);
      if (n_i == 0) continue;
      const double w = gamma(v, i) / static_cast<double>(n_i);
      const auto row = counts[v].row(i);
      for (std::size_t j = 0; j < L; ++j) theta(i, j) += w * row[j];
    }
  }
  return KernelEstimate(std::move(theta));
}

std::vector<double> SimilarityWeights::aggregate() const {
  std::vector<double> out(gamma.rows(), 0.0);
  for (std::size_t v = 0; v < gamma.rows(); ++v) {
    for (double g : gamma.row(v)) out[v] += g;
  }
  return out;
}

namespace {

struct Prefix {
  std::vector<std::size_t> path;  // cluster index per round
  PseudoCounts summed;            // Σ pooled counts along the path
  double log_xi = 0.0;            // log ∫ Π P_θ(x^{c_k}) G_1(dθ)
  double log_omega = 0.0;         // Σ log ω along the path
};

}  // namespace

ChainExpansion::ChainExpansion(const CampModel& model, std::size_t chain_budget)
    : model_(&model) {
  const std::size_t K = model.rounds.size();
  if (K == 0) throw ConfigError("chain expansion needs at least one sampled round");
  const std::size_t L = model.alphabet_size;
  const double dim = static_cast<double>(L);
  const double users = static_cast<double>(model.num_users());

  // Distinct clusters per round with their membership totals n^k_c.
  std::vector<std::vector<double>> log_share(K);  // log(n^k_c / (B·U))
  std::vector<std::vector<TransitionCounts>> pooled(K);
  clusters_.resize(K);
  double chains = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    std::map<std::vector<std::size_t>, std::size_t> occurrences;
    for (const auto& sample : model.rounds[k]) {
      for (const auto& [id, cluster] : sample.clusters()) ++occurrences[cluster.members];
    }
    const double norm = static_cast<double>(model.rounds[k].size()) * users;
    for (const auto& [members, times] : occurrences) {
      clusters_[k].push_back(members);
      log_share[k].push_back(std::log(static_cast<double>(members.size() * times) / norm));
      TransitionCounts sum(L);
      for (std::size_t u : members) sum += model.counts[u];
      pooled[k].push_back(std::move(sum));
    }
    chains *= static_cast<double>(clusters_[k].size());
  }
  if (chains > static_cast<double>(chain_budget)) {
    throw BudgetError("similarity weights need " + std::to_string(static_cast<long long>(chains)) +
                      " cluster chains, over the budget of " + std::to_string(chain_budget) +
                      "; reduce K or B, or prune harder");
  }
  num_chains_ = static_cast<std::size_t>(chains);

  std::vector<Prefix> prefixes(1);
  prefixes[0].summed = PseudoCounts(L);
  std::vector<double> log_omega_final;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& round = pooled[k];
    // log ω^k_c = log(n^k_c / BU) − log Σ_prefix ξ(prefix, c) Π ω(prefix)
    std::vector<double> log_omega(round.size());
    std::vector<std::vector<double>> terms(round.size());
    for (std::size_t c = 0; c < round.size(); ++c) {
      terms[c].reserve(prefixes.size());
      for (const auto& p : prefixes) {
        terms[c].push_back(p.log_xi + log_marginal(round[c], p.summed) + p.log_omega);
      }
      log_omega[c] = log_share[k][c] - log_sum_exp(terms[c]);
    }
    if (k + 1 == K) {
      log_omega_final = std::move(log_omega);
      break;
    }
    std::vector<Prefix> next;
    next.reserve(prefixes.size() * round.size());
    for (std::size_t pi = 0; pi < prefixes.size(); ++pi) {
      for (std::size_t c = 0; c < round.size(); ++c) {
        Prefix q;
        q.path = prefixes[pi].path;
        q.path.push_back(c);
        q.summed = prefixes[pi].summed;
        q.summed += round[c];
        q.log_xi = prefixes[pi].log_xi + log_marginal(round[c], prefixes[pi].summed);
        q.log_omega = prefixes[pi].log_omega + log_omega[c];
        next.push_back(std::move(q));
      }
    }
    prefixes = std::move(next);
  }

  // Full chains (prefix, c_K): W = ξ · Π ω · U / |c_K|, accumulated as
  // W / (L + N_i) per location.
  const auto& last = pooled[K - 1];
  eta_.assign(last.size(), std::vector<double>(L, 0.0));
  through_.assign(last.size(), {});
  for (std::size_t c = 0; c < last.size(); ++c) {
    through_[c].resize(K - 1);
    for (std::size_t k = 0; k + 1 < K; ++k) {
      through_[c][k].assign(clusters_[k].size(), std::vector<double>(L, 0.0));
    }
  }
  std::vector<double> a(L);
  for (const auto& p : prefixes) {
    for (std::size_t c = 0; c < last.size(); ++c) {
      const double log_w = p.log_xi + log_marginal(last[c], p.summed) + p.log_omega +
                           log_omega_final[c] + std::log(users) -
                           std::log(static_cast<double>(clusters_[K - 1][c].size()));
      const double w = std::exp(log_w);
      for (std::size_t i = 0; i < L; ++i) {
        a[i] = w / (dim + p.summed.row_sum(i) + last[c].row_sum(i));
        eta_[c][i] += a[i];
      }
      for (std::size_t k = 0; k + 1 < K; ++k) {
        auto& slot = through_[c][k][p.path[k]];
        for (std::size_t i = 0; i < L; ++i) slot[i] += a[i];
      }
    }
  }
}

SimilarityWeights ChainExpansion::weights(std::size_t user) const {
  const auto& model = *model_;
  if (user >= model.num_users()) {
    throw DataError("similarity weights: unknown user index " + std::to_string(user));
  }
  const std::size_t L = model.alphabet_size;
  const std::size_t K = clusters_.size();
  SimilarityWeights out{std::vector<double>(L, 0.0), Matrix<double>(model.num_users(), L, 0.0)};
  // Σ over chains ending in a cluster containing u of W·m_v/(L+N_i), where
  // m_v counts the rounds whose cluster contains v.
  Matrix<double> mass(model.num_users(), L, 0.0);
  const auto& final_clusters = clusters_[K - 1];
  for (std::size_t c = 0; c < final_clusters.size(); ++c) {
    const auto& members = final_clusters[c];
    if (!std::binary_search(members.begin(), members.end(), user)) continue;
    for (std::size_t i = 0; i < L; ++i) out.eta[i] += eta_[c][i];
    for (std::size_t v : members) {
      for (std::size_t i = 0; i < L; ++i) mass(v, i) += eta_[c][i];
    }
    for (std::size_t k = 0; k + 1 < K; ++k) {
      for (std::size_t c2 = 0; c2 < clusters_[k].size(); ++c2) {
        const auto& slot = through_[c][k][c2];
        for (std::size_t v : clusters_[k][c2]) {
          for (std::size_t i = 0; i < L; ++i) mass(v, i) += slot[i];
        }
      }
    }
  }
  for (std::size_t v = 0; v < model.num_users(); ++v) {
    for (std::size_t i = 0; i < L; ++i) {
      out.gamma(v, i) = static_cast<double>(model.counts[v].row_sum(i)) * mass(v, i);
    }
  }
  return out;
}

SimilarityWeights lemma1_weights(const CampModel& model, std::size_t user,
                                 std::size_t chain_budget) {
  return ChainExpansion(model, chain_budget).weights(user);
}

std::optional<double> estimate_staying_time(std::span<const double> weights,
                                            std::span<const StaySamples> stays) {
  double total_weight = 0.0;
  double total = 0.0;
  for (const auto& s : stays) {
    if (s.stays.empty() || s.user >= weights.size()) continue;
    const double w = weights[s.user];
    if (!(w > 0.0)) continue;
    double sum = 0.0;
    for (double x : s.stays) sum += x;
    total += w * sum / static_cast<double>(s.stays.size());
    total_weight += w;
  }
  if (!(total_weight > 0.0)) return std::nullopt;
  return total / total_weight;
}

std::vector<StaySamples> stays_at(const TraceSet& traces, Location at,
                                  std::span<const std::size_t> visible) {
  std::vector<StaySamples> out;
  for (std::size_t v = 0; v < traces.num_users(); ++v) {
    const auto& trajectory = traces.trajectories[v];
    if (!trajectory.staying_times) continue;
    std::size_t n = trajectory.size();
    if (!visible.empty()) n = std::min(n, visible[v]);
    StaySamples samples{v, {}};
    // The stay at visit t is known once visit t+1 has been observed.
    for (std::size_t t = 0; t + 1 < n; ++t) {
      if (trajectory.locations[t] == at) samples.stays.push_back((*trajectory.staying_times)[t]);
    }
    if (!samples.stays.empty()) out.push_back(std::move(samples));
  }
  return out;
}

std::optional<double> estimate_staying_time(const SimilarityWeights& weights,
                                            const TraceSet& traces, Location at) {
  std::vector<double> column(weights.gamma.rows());
  for (std::size_t v = 0; v < column.size(); ++v) column[v] = weights.gamma(v, at);
  const auto stays = stays_at(traces, at);
  return estimate_staying_time(column, stays);
}

}  // namespace camp
