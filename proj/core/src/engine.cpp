#include "camp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "camp/errors.hpp"

namespace camp {

void CampConfig::validate() const {
  if (iterations < 1) throw ConfigError("CAMP iterations K must be >= 1");
  if (samples < 1) throw ConfigError("CAMP samples B must be >= 1");
  if (sweeps < 1) throw ConfigError("CAMP sweeps M must be >= 1");
  if (prune.max_components < 1) throw ConfigError("prune max_components must be >= 1");
  if (!(prune.min_weight >= 0.0)) throw ConfigError("prune min_weight must be >= 0");
}

std::size_t CampModel::user_index(const std::string& user_id) const {
  const auto it = std::find(users.begin(), users.end(), user_id);
  if (it == users.end()) throw DataError("unknown user '" + user_id + "'");
  return static_cast<std::size_t>(it - users.begin());
}

MixtureBase update_base(const MixtureBase& base,
                        std::span<const ClusterAssignment> samples,
                        std::span<const TransitionCounts> counts,
                        const PruneLimits& limits) {
  if (samples.empty()) throw ConfigError("update_base needs at least one sample");
  // Identical clusters from different samples are one kernel-density term
  // whose weight counts every (user, sample) membership.
  std::map<std::vector<std::size_t>, std::size_t> occurrences;
  for (const auto& sample : samples) {
    for (const auto& [id, cluster] : sample.clusters()) ++occurrences[cluster.members];
  }
  const double norm = static_cast<double>(samples.size()) * static_cast<double>(counts.size());
  std::vector<MixtureComponent> components;
  for (const auto& [members, times] : occurrences) {
    TransitionCounts pooled(base.size());
    for (std::size_t u : members) pooled += counts[u];
    const double share = static_cast<double>(members.size() * times) / norm;
    const auto resp = responsibilities(pooled, base);
    for (std::size_t m = 0; m < base.num_components(); ++m) {
      if (!(resp[m] > 0.0)) continue;
      MixtureComponent c{share * resp[m], base.component(m).pseudo};
      c.pseudo += pooled;
      components.push_back(std::move(c));
    }
  }
  return prune(MixtureBase(base.size(), std::move(components)), limits);
}

double expected_clusters(double alpha, std::size_t num_users) {
  double total = 0.0;
  for (std::size_t i = 1; i <= num_users; ++i) {
    total += alpha / (alpha + static_cast<double>(i - 1));
  }
  return total;
}

double update_alpha(double mean_clusters, std::size_t num_users) {
  if (num_users < 1) throw ConfigError("update_alpha needs at least one user");
  if (mean_clusters <= 1.0) return kAlphaMin;
  if (mean_clusters >= static_cast<double>(num_users)) return kAlphaMax;
  double lo = kAlphaMin;
  double hi = kAlphaMax;
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (expected_clusters(mid, num_users) < mean_clusters) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double update_alpha(std::span<const ClusterAssignment> samples, std::size_t num_users) {
  if (samples.empty()) throw ConfigError("update_alpha needs at least one sample");
  double total = 0.0;
  for (const auto& s : samples) total += static_cast<double>(s.num_clusters());
  return update_alpha(total / static_cast<double>(samples.size()), num_users);
}

namespace {

std::vector<KernelEstimate> estimate_all(const CampModel& model) {
  const std::size_t L = model.alphabet_size;
  std::vector<Matrix<double>> sums(model.num_users(), Matrix<double>(L, L, 0.0));
  const auto& samples = model.final_samples();
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (const auto& sample : samples) {
    for (const auto& [id, cluster] : sample.clusters()) {
      const auto mean = posterior_mean(cluster.pooled, model.base);
      for (std::size_t u : cluster.members) {
        auto& acc = sums[u];
        for (std::size_t i = 0; i < L; ++i) {
          for (std::size_t j = 0; j < L; ++j) acc(i, j) += scale * mean(i, j);
        }
      }
    }
  }
  std::vector<KernelEstimate> out;
  out.reserve(sums.size());
  for (auto& m : sums) out.emplace_back(std::move(m));
  return out;
}

}  // namespace

CampModel fit(std::span<const TransitionCounts> counts, std::vector<std::string> users,
              const CampConfig& config) {
  config.validate();
  if (counts.empty()) throw DataError("cannot fit CAMP without users");
  if (users.size() != counts.size()) throw ConfigError("users and counts differ in length");
  CampModel model;
  model.alphabet_size = counts[0].size();
  model.users = std::move(users);
  model.counts.assign(counts.begin(), counts.end());
  model.base = MixtureBase::uniform(model.alphabet_size);
  model.alpha = 1.0;
  model.alpha_history.push_back(model.alpha);

  const auto batch = static_cast<std::size_t>(config.samples);
  for (int k = 0; k < config.iterations; ++k) {
    GibbsConfig gibbs{model.alpha, model.base, config.sweeps,
                      config.seed + static_cast<std::uint64_t>(k) * batch};
    model.rounds.push_back(draw_batch(model.counts, gibbs, batch, config.threads));
    if (k + 1 == config.iterations) break;
    model.base = update_base(model.base, model.rounds.back(), model.counts, config.prune);
    model.alpha = update_alpha(model.rounds.back(), model.num_users());
    model.alpha_history.push_back(model.alpha);
  }
  model.theta = estimate_all(model);
  return model;
}

CampModel fit(const TraceSet& traces, const CampConfig& config) {
  std::vector<std::string> users;
  users.reserve(traces.num_users());
  for (const auto& t : traces.trajectories) users.push_back(t.user_id);
  return fit(traces.counts(), std::move(users), config);
}

KernelEstimate estimate_theta(const CampModel& model, std::size_t user) {
  if (user >= model.num_users()) {
    throw DataError("estimate_theta: unknown user index " + std::to_string(user));
  }
  if (model.rounds.empty() || model.final_samples().empty()) {
    throw ConfigError("estimate_theta: model has no final samples");
  }
  const std::size_t L = model.alphabet_size;
  Matrix<double> theta(L, L, 0.0);
  const auto& samples = model.final_samples();
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (const auto& sample : samples) {
    const auto mean = posterior_mean(sample.cluster(sample.cluster_of(user)).pooled, model.base);
    for (std::size_t i = 0; i < L; ++i) {
      for (std::size_t j = 0; j < L; ++j) theta(i, j) += scale * mean(i, j);
    }
  }
  return KernelEstimate(std::move(theta));
}

}  // namespace camp
