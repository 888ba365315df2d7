#include "camp/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "camp/errors.hpp"
#include "camp/log_gamma.hpp"
#include "camp/parallel.hpp"
#include "camp/rng.hpp"

namespace camp {

ClusterAssignment::ClusterAssignment(std::vector<ClusterId> labels,
                                     std::span<const TransitionCounts> counts)
    : labels_(std::move(labels)) {
  if (labels_.size() != counts.size()) {
    throw ConfigError("cluster labels and counts differ in length");
  }
  for (std::size_t u = 0; u < labels_.size(); ++u) {
    const ClusterId id = labels_[u];
    if (id < 0) throw ConfigError("cluster ids must be non-negative");
    auto& cluster = clusters_[id];
    if (cluster.members.empty()) cluster.pooled = TransitionCounts(counts[u].size());
    cluster.members.push_back(u);
    cluster.pooled += counts[u];
    next_id_ = std::max(next_id_, id + 1);
  }
}

ClusterAssignment ClusterAssignment::single_cluster(
    std::span<const TransitionCounts> counts) {
  return ClusterAssignment(std::vector<ClusterId>(counts.size(), 0), counts);
}

std::vector<std::vector<std::size_t>> ClusterAssignment::blocks() const {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(clusters_.size());
  for (const auto& [id, cluster] : clusters_) out.push_back(cluster.members);
  std::sort(out.begin(), out.end());
  return out;
}

void ClusterAssignment::remove(std::size_t user, const TransitionCounts& counts) {
  auto it = clusters_.find(labels_[user]);
  auto& members = it->second.members;
  members.erase(std::lower_bound(members.begin(), members.end(), user));
  if (members.empty()) {
    clusters_.erase(it);
  } else {
    it->second.pooled -= counts;
  }
  labels_[user] = -1;
}

void ClusterAssignment::insert(std::size_t user, ClusterId id,
                               const TransitionCounts& counts) {
  auto& cluster = clusters_.at(id);
  cluster.members.insert(
      std::upper_bound(cluster.members.begin(), cluster.members.end(), user), user);
  cluster.pooled += counts;
  labels_[user] = id;
}

ClusterId ClusterAssignment::open(std::size_t user, const TransitionCounts& counts) {
  const ClusterId id = next_id_++;
  auto& cluster = clusters_[id];
  cluster.members = {user};
  cluster.pooled = counts;
  labels_[user] = id;
  return id;
}

bool ClusterAssignment::is_consistent(std::span<const TransitionCounts> counts) const {
  if (counts.size() != labels_.size()) return false;
  std::vector<int> seen(labels_.size(), 0);
  for (const auto& [id, cluster] : clusters_) {
    if (cluster.members.empty()) return false;
    TransitionCounts pooled(counts.empty() ? 0 : counts[0].size());
    for (std::size_t u : cluster.members) {
      if (u >= labels_.size() || labels_[u] != id) return false;
      ++seen[u];
      pooled += counts[u];
    }
    if (!(pooled == cluster.pooled)) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

void GibbsConfig::validate(std::size_t alphabet_size) const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("concentration alpha must be positive");
  }
  if (sweeps < 1) throw ConfigError("number of sweeps must be >= 1");
  if (base.num_components() == 0) throw ConfigError("Gibbs base measure is empty");
  if (base.size() != alphabet_size) {
    throw ConfigError("base measure size does not match the alphabet");
  }
}

CrpWeights crp_step_weights(std::size_t user, const TransitionCounts& user_counts,
                            const ClusterAssignment& others,
                            const GibbsConfig& config) {
  if (others.is_assigned(user)) {
    throw ConfigError("crp_step_weights: user " + std::to_string(user) +
                      " must be removed from its cluster first");
  }
  std::vector<double> logs;
  std::vector<ClusterId> ids;
  for (const auto& [id, cluster] : others.clusters()) {
    ids.push_back(id);
    logs.push_back(std::log(static_cast<double>(cluster.members.size())) +
                   log_mixture_marginal(user_counts, condition(config.base, cluster.pooled)));
  }
  logs.push_back(std::log(config.alpha) + log_mixture_marginal(user_counts, config.base));
  const double norm = log_sum_exp(logs);
  CrpWeights out;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    out.existing.emplace_back(ids[k], std::exp(logs[k] - norm));
  }
  out.new_cluster = std::exp(logs.back() - norm);
  return out;
}

namespace {

struct SparseCounts {
  struct Entry {
    std::uint32_t i, j;
    int n;
  };
  struct Row {
    std::uint32_t i;
    int n;
  };
  std::vector<Entry> entries;
  std::vector<Row> rows;

  explicit SparseCounts(const TransitionCounts& counts) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts.row_sum(i) == 0) continue;
      rows.push_back({static_cast<std::uint32_t>(i), counts.row_sum(i)});
      const auto row = counts.row(i);
      for (std::size_t j = 0; j < counts.size(); ++j) {
        if (row[j] != 0) {
          entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), row[j]});
        }
      }
    }
  }
};

// log_marginal(counts, pseudo + offset) restricted to the non-zero entries.
double sparse_log_marginal(const SparseCounts& counts, const PseudoCounts& pseudo,
                           const TransitionCounts& offset, double dim) {
  double total = 0.0;
  for (const auto& r : counts.rows) {
    total -= log_rising(dim + pseudo.row_sum(r.i) + offset.row_sum(r.i), r.n);
  }
  for (const auto& e : counts.entries) {
    total += log_rising(1.0 + pseudo(e.i, e.j) + offset(e.i, e.j), e.n);
  }
  return total;
}

double sparse_log_marginal(const SparseCounts& counts, const PseudoCounts& pseudo,
                           double dim) {
  double total = 0.0;
  for (const auto& r : counts.rows) total -= log_rising(dim + pseudo.row_sum(r.i), r.n);
  for (const auto& e : counts.entries) {
    total += log_rising(1.0 + pseudo(e.i, e.j), e.n);
  }
  return total;
}

void normalize_log(std::vector<double>& values) {
  const double norm = log_sum_exp(values);
  for (double& v : values) v -= norm;
}

// One collapsed Gibbs chain. Each cluster caches the log posterior
// responsibilities of the base components given its pooled counts, so the
// predictive of a user's data only touches that user's non-zero counts.
class Chain {
 public:
  Chain(std::span<const TransitionCounts> counts, const GibbsConfig& config)
      : counts_(counts),
        config_(config),
        dim_(static_cast<double>(config.base.size())),
        L_(config.base.size()),
        rng_(make_rng(config.seed)) {
    build_integral_layout(counts);
    const auto& base = config_.base;
    log_weights_.reserve(base.num_components());
    for (const auto& c : base.components()) log_weights_.push_back(std::log(c.weight));
    sparse_.reserve(counts.size());
    new_predictive_.resize(counts.size());
    new_resp_.resize(counts.size());
    for (std::size_t u = 0; u < counts.size(); ++u) {
      sparse_.emplace_back(counts[u]);
      auto& resp = new_resp_[u];
      resp = log_weights_;
      for (std::size_t m = 0; m < resp.size(); ++m) {
        resp[m] += sparse_log_marginal(sparse_[u], base.component(m).pseudo, dim_);
      }
      new_predictive_[u] = log_sum_exp(resp);
      for (double& v : resp) v -= new_predictive_[u];
    }
  }

  ClusterAssignment run() {
    state_ = ClusterAssignment::single_cluster(counts_);
    if (counts_.empty()) return state_;
    log_resp_.clear();
    for (const auto& [id, cluster] : state_.clusters()) {
      log_resp_[id] = fresh_responsibilities(cluster.pooled);
    }
    for (int sweep = 0; sweep < config_.sweeps; ++sweep) {
      for (std::size_t u = 0; u < counts_.size(); ++u) step(u);
    }
    return state_;
  }

 private:
  std::vector<double> fresh_responsibilities(const TransitionCounts& pooled) const {
    std::vector<double> resp = log_weights_;
    for (std::size_t m = 0; m < resp.size(); ++m) {
      resp[m] += log_marginal(pooled, config_.base.component(m).pseudo);
    }
    normalize_log(resp);
    return resp;
  }

  // Writes per-component log predictives of u's data given `pooled` into
  // scratch and returns the mixture predictive under `resp`.
  double predictive(std::size_t u, const TransitionCounts& pooled,
                    const std::vector<double>& resp, std::vector<double>& scratch) const {
    const std::size_t M = resp.size();
    if (integral_) {
      integral_predictives(u, pooled, scratch);
    } else {
      const auto& base = config_.base;
      scratch.resize(M);
      for (std::size_t m = 0; m < M; ++m) {
        scratch[m] = sparse_log_marginal(sparse_[u], base.component(m).pseudo, pooled, dim_);
      }
    }
    if (M == 1) return resp[0] + scratch[0];
    combined_.resize(M);
    for (std::size_t m = 0; m < M; ++m) combined_[m] = resp[m] + scratch[m];
    return log_sum_exp(combined_);
  }

  // All pseudo-counts integral: every rising factorial is a difference of
  // table entries, laid out component-contiguous for each (i, j).
  void integral_predictives(std::size_t u, const TransitionCounts& pooled,
                            std::vector<double>& out) const {
    const std::size_t M = log_weights_.size();
    const double* table = detail::kLogGammaTable;
    out.assign(M, 0.0);
    double* acc = out.data();
    for (const auto& r : sparse_[u].rows) {
      const int offset = pooled.row_sum(r.i);
      const int* first = row_base_.data() + r.i * M;
      for (std::size_t m = 0; m < M; ++m) {
        const int x = first[m] + offset;
        acc[m] -= table[x + r.n] - table[x];
      }
    }
    for (const auto& e : sparse_[u].entries) {
      const int offset = pooled(e.i, e.j);
      const int* first = entry_base_.data() + (e.i * L_ + e.j) * M;
      for (std::size_t m = 0; m < M; ++m) {
        const int x = first[m] + offset;
        acc[m] += table[x + e.n] - table[x];
      }
    }
  }

  void build_integral_layout(std::span<const TransitionCounts> counts) {
    const auto& base = config_.base;
    const std::size_t M = base.num_components();
    double largest = dim_;
    for (const auto& c : base.components()) {
      for (std::size_t i = 0; i < L_; ++i) {
        if (c.pseudo.row_sum(i) != std::floor(c.pseudo.row_sum(i))) return;
        largest = std::max(largest, dim_ + c.pseudo.row_sum(i));
        for (std::size_t j = 0; j < L_; ++j) {
          if (c.pseudo(i, j) != std::floor(c.pseudo(i, j))) return;
        }
      }
    }
    double total = 0.0;
    for (const auto& c : counts) total += c.total();
    if (largest + 2.0 * total + 1.0 >= static_cast<double>(detail::kLogGammaTableSize)) return;
    row_base_.resize(L_ * M);
    entry_base_.resize(L_ * L_ * M);
    for (std::size_t m = 0; m < M; ++m) {
      const auto& pseudo = base.component(m).pseudo;
      for (std::size_t i = 0; i < L_; ++i) {
        row_base_[i * M + m] = static_cast<int>(dim_ + pseudo.row_sum(i));
        for (std::size_t j = 0; j < L_; ++j) {
          entry_base_[(i * L_ + j) * M + m] = static_cast<int>(1.0 + pseudo(i, j));
        }
      }
    }
    integral_ = true;
  }

  void step(std::size_t u) {
    const auto& user_counts = counts_[u];
    const ClusterId old = state_.cluster_of(u);
    state_.remove(u, user_counts);
    auto old_it = state_.clusters().find(old);
    if (old_it == state_.clusters().end()) {
      log_resp_.erase(old);
    } else if (!user_counts.empty() && log_weights_.size() > 1) {
      auto& resp = log_resp_.at(old);
      predictive(u, old_it->second.pooled, resp, scratch_);
      for (std::size_t m = 0; m < resp.size(); ++m) resp[m] -= scratch_[m];
      normalize_log(resp);
    }

    const std::size_t k = state_.num_clusters();
    ids_.clear();
    logits_.clear();
    ids_.reserve(k);
    for (const auto& [id, cluster] : state_.clusters()) {
      const double pred = predictive(u, cluster.pooled, log_resp_.at(id), scratch_);
      ids_.push_back(id);
      logits_.push_back(std::log(static_cast<double>(cluster.members.size())) + pred);
    }
    logits_.push_back(std::log(config_.alpha) + new_predictive_[u]);

    const double top = *std::max_element(logits_.begin(), logits_.end());
    double total = 0.0;
    for (double& v : logits_) {
      v = std::exp(v - top);
      total += v;
    }
    double draw = uniform01(rng_) * total;
    std::size_t choice = logits_.size() - 1;
    for (std::size_t c = 0; c + 1 < logits_.size(); ++c) {
      draw -= logits_[c];
      if (draw < 0.0) {
        choice = c;
        break;
      }
    }

    if (choice == ids_.size()) {
      const ClusterId id = state_.open(u, user_counts);
      log_resp_[id] = new_resp_[u];
      return;
    }
    const ClusterId id = ids_[choice];
    if (log_weights_.size() > 1 && !user_counts.empty()) {
      auto& resp = log_resp_.at(id);
      predictive(u, state_.cluster(id).pooled, resp, scratch_);
      for (std::size_t m = 0; m < resp.size(); ++m) resp[m] += scratch_[m];
      normalize_log(resp);
    }
    state_.insert(u, id, user_counts);
  }

  std::span<const TransitionCounts> counts_;
  const GibbsConfig& config_;
  double dim_;
  std::size_t L_;
  Rng rng_;
  bool integral_ = false;
  std::vector<int> row_base_;    // [i][m] = L + A_i
  std::vector<int> entry_base_;  // [i][j][m] = 1 + A_ij
  std::vector<double> log_weights_;
  std::vector<SparseCounts> sparse_;
  std::vector<double> new_predictive_;
  std::vector<std::vector<double>> new_resp_;

  ClusterAssignment state_;
  std::map<ClusterId, std::vector<double>> log_resp_;

  std::vector<double> scratch_;
  mutable std::vector<double> combined_;
  std::vector<ClusterId> ids_;
  std::vector<double> logits_;
};

}  // namespace

ClusterAssignment gibbs_sample(std::span<const TransitionCounts> counts,
                               const GibbsConfig& config) {
  config.validate(counts.empty() ? config.base.size() : counts[0].size());
  Chain chain(counts, config);
  return chain.run();
}

ClusterAssignment gibbs_sample(const TraceSet& traces, const GibbsConfig& config) {
  const auto counts = traces.counts();
  return gibbs_sample(counts, config);
}

std::vector<ClusterAssignment> draw_batch(std::span<const TransitionCounts> counts,
                                          const GibbsConfig& config, std::size_t batch,
                                          unsigned threads) {
  if (batch < 1) throw ConfigError("batch size must be >= 1");
  config.validate(counts.empty() ? config.base.size() : counts[0].size());
  std::vector<ClusterAssignment> out(batch);
  parallel_for(batch, threads, [&](std::size_t b) {
    GibbsConfig chain_config = config;
    chain_config.seed = config.seed + b;
    Chain chain(counts, chain_config);
    out[b] = chain.run();
  });
  return out;
}

}  // namespace camp
