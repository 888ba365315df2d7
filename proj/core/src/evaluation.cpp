#include "camp/evaluation.hpp"

#include <algorithm>
#include <memory>
#include <string>
#include <tuple>

#include "camp/errors.hpp"
#include "camp/lemma.hpp"

namespace camp {

namespace {

struct Visit {
  std::int64_t arrival;
  std::size_t user;
  std::size_t index;  // 0-based
};

// A fitted model plus its lazily built chain expansion.
struct Fit {
  CampModel model;
  std::unique_ptr<ChainExpansion> chains;
  bool chains_failed = false;
};

std::optional<double> mean_of(std::span<const StaySamples> stays) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : stays) {
    for (double x : s.stays) sum += x;
    n += s.stays.size();
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

class Streamer {
 public:
  Streamer(const TraceSet& traces, const EvalConfig& config)
      : traces_(traces), config_(config), L_(traces.num_locations()), U_(traces.num_users()) {
    for (std::size_t u = 0; u < U_; ++u) {
      users_.push_back(traces.trajectories[u].user_id);
      full_.push_back(MarkovStats::from_prefix(traces.trajectories[u].locations, L_));
      own_.emplace_back(L_);
      own2_.emplace_back(L_);
      seen_.push_back(0);
    }
    pooled_full_ = MarkovStats(L_);
    for (const auto& stats : full_) pooled_full_ += stats;
    pooled_visible_ = MarkovStats(L_);
    campc_.resize(U_);
    campc_events_.assign(U_, 0);
  }

  PredictionLog run() {
    PredictionLog log;
    log.predictors = config_.predictors;
    log.schedule = config_.schedule.describe();
    for (const auto& trajectory : traces_.trajectories) log.lengths.push_back(trajectory.size());

    std::vector<Visit> visits;
    for (std::size_t u = 0; u < U_; ++u) {
      const auto& trajectory = traces_.trajectories[u];
      if (!trajectory.arrival_times) {
        throw DataError("user '" + trajectory.user_id + "' has no arrival times; streaming evaluation needs them");
      }
      for (std::size_t s = 0; s < trajectory.size(); ++s) {
        visits.push_back({(*trajectory.arrival_times)[s], u, s});
      }
    }
    std::sort(visits.begin(), visits.end(), [](const Visit& a, const Visit& b) {
      return std::tie(a.arrival, a.user, a.index) < std::tie(b.arrival, b.user, b.index);
    });

    // The target's own first visit is always visible; feed first visits of
    // Markov stats up front.
    for (std::size_t u = 0; u < U_; ++u) {
      if (traces_.trajectories[u].size() == 0) continue;
      const Location x = traces_.trajectories[u].locations[0];
      own_[u].observe(std::nullopt, x);
      own2_[u].observe(x);
    }

    std::size_t next_visible = 0;
    for (const auto& visit : visits) {
      if (visit.index == 0) continue;
      const std::int64_t cutoff = visit.arrival;
      while (next_visible < visits.size() && visits[next_visible].arrival < cutoff) {
        reveal(visits[next_visible]);
        ++next_visible;
      }
      log.events.push_back(predict(visit.user, visit.index + 1, cutoff));
      const auto& trajectory = traces_.trajectories[visit.user];
      const Location x = trajectory.locations[visit.index];
      own_[visit.user].observe(trajectory.locations[visit.index - 1], x);
      own2_[visit.user].observe(x);
      ++camp_events_;
      ++campc_events_[visit.user];
    }
    log.camp_fits = fits_;
    log.stay_budget_failures = budget_failures_;
    return log;
  }

 private:
  void reveal(const Visit& visit) {
    const auto& trajectory = traces_.trajectories[visit.user];
    const Location x = trajectory.locations[visit.index];
    pooled_visible_.observe(
        visit.index == 0 ? std::nullopt : std::optional<Location>(trajectory.locations[visit.index - 1]), x);
    seen_[visit.user] = visit.index + 1;
  }

  // Visible lengths at the cutoff: others by arrival, the target t-1.
  std::vector<std::size_t> visible(std::size_t user, std::size_t t) const {
    auto out = seen_;
    out[user] = t - 1;
    return out;
  }

  std::vector<TransitionCounts> counts_for(std::span<const std::size_t> lengths) const {
    std::vector<TransitionCounts> out;
    out.reserve(U_);
    for (std::size_t v = 0; v < U_; ++v) {
      out.push_back(count_transitions(traces_.trajectories[v], L_, lengths[v]));
    }
    return out;
  }

  Fit& camp_fit(std::size_t user, std::size_t t) {
    const bool due = !camp_ || config_.schedule.due(camp_events_);
    if (due) {
      const auto lengths = visible(user, t);
      camp_ = std::make_unique<Fit>();
      camp_->model = fit(counts_for(lengths), users_, config_.camp);
      ++fits_;
      camp_events_ = 0;
    }
    return *camp_;
  }

  Fit& campc_fit(std::size_t user, std::size_t t) {
    auto& slot = campc_[user];
    if (!slot || config_.schedule.due(campc_events_[user])) {
      std::vector<std::size_t> lengths(U_);
      for (std::size_t v = 0; v < U_; ++v) lengths[v] = traces_.trajectories[v].size();
      lengths[user] = t - 1;
      slot = std::make_unique<Fit>();
      slot->model = fit(counts_for(lengths), users_, config_.camp);
      ++fits_;
      campc_events_[user] = 0;
    }
    return *slot;
  }

  std::optional<double> camp_stay(Fit& f, std::size_t user, Location at,
                                  std::span<const std::size_t> lengths) {
    if (f.chains_failed) {
      ++budget_failures_;
      return std::nullopt;
    }
    if (!f.chains) {
      try {
        f.chains = std::make_unique<ChainExpansion>(f.model);
      } catch (const BudgetError&) {
        f.chains_failed = true;
        ++budget_failures_;
        return std::nullopt;
      }
    }
    const auto weights = f.chains->weights(user);
    std::vector<double> column(U_);
    for (std::size_t v = 0; v < U_; ++v) column[v] = weights.gamma(v, at);
    const auto stays = stays_at(traces_, at, lengths);
    return estimate_staying_time(column, stays);
  }

  PredictionEvent predict(std::size_t user, std::size_t t, std::int64_t cutoff) {
    const auto& trajectory = traces_.trajectories[user];
    PredictionEvent event;
    event.user = user;
    event.t = t;
    event.cutoff = cutoff;
    event.previous = trajectory.locations[t - 2];
    event.actual = trajectory.locations[t - 1];
    const bool stays = config_.staying_times && trajectory.staying_times &&
                       t - 1 < trajectory.staying_times->size();
    if (stays) event.stay_truth = (*trajectory.staying_times)[t - 1];
    const Location at = event.actual;

    // Stays are known once the next visit has arrived; the target's own
    // arrival at x_t reveals its stay at x_{t-1}.
    auto stay_lengths = [&](bool complete_others) {
      std::vector<std::size_t> lengths(U_);
      for (std::size_t v = 0; v < U_; ++v) {
        lengths[v] = complete_others ? traces_.trajectories[v].size() : seen_[v];
      }
      lengths[user] = t;
      return lengths;
    };
    auto own_stays = [&]() {
      std::vector<std::size_t> lengths(U_, 0);
      lengths[user] = t;
      return mean_of(stays_at(traces_, at, lengths));
    };

    for (auto kind : config_.predictors) {
      Location guess = 0;
      std::optional<double> stay;
      switch (kind) {
        case PredictorKind::kMarkov:
          guess = predict_markov(own_[user], event.previous);
          if (stays) stay = own_stays();
          break;
        case PredictorKind::kMarkovO2:
          guess = own2_[user].predict();
          if (stays) stay = own_stays();
          break;
        case PredictorKind::kAgg:
        case PredictorKind::kAggC: {
          const bool complete = kind == PredictorKind::kAggC;
          MarkovStats pooled = complete ? pooled_full_ : pooled_visible_;
          if (complete) {
            // Swap the target's full trajectory for its prefix.
            pooled.counts -= full_[user].counts;
            for (std::size_t i = 0; i < L_; ++i) pooled.visits[i] -= full_[user].visits[i];
            pooled += own_[user];
          }
          guess = predict_markov(pooled, event.previous);
          if (stays) {
            const auto lengths = stay_lengths(complete);
            stay = mean_of(stays_at(traces_, at, lengths));
          }
          break;
        }
        case PredictorKind::kCamp:
        case PredictorKind::kCampC: {
          const bool complete = kind == PredictorKind::kCampC;
          Fit& f = complete ? campc_fit(user, t) : camp_fit(user, t);
          guess = f.model.theta[user].argmax(event.previous);
          if (stays) {
            const auto lengths = stay_lengths(complete);
            stay = camp_stay(f, user, at, lengths);
          }
          break;
        }
      }
      event.predicted.push_back(guess);
      event.stay_estimate.push_back(stay);
    }
    return event;
  }

  const TraceSet& traces_;
  const EvalConfig& config_;
  std::size_t L_;
  std::size_t U_;
  std::vector<std::string> users_;
  std::vector<MarkovStats> full_;
  std::vector<MarkovStats> own_;
  std::vector<SecondOrderStats> own2_;
  std::vector<std::size_t> seen_;
  MarkovStats pooled_full_;
  MarkovStats pooled_visible_;
  std::unique_ptr<Fit> camp_;
  std::size_t camp_events_ = 0;
  std::vector<std::unique_ptr<Fit>> campc_;
  std::vector<std::size_t> campc_events_;
  std::size_t fits_ = 0;
  std::size_t budget_failures_ = 0;
};

}  // namespace

PredictionLog run_streaming(const TraceSet& traces, const EvalConfig& config) {
  traces.validate();
  config.camp.validate();
  if (config.predictors.empty()) throw ConfigError("no predictors configured");
  return Streamer(traces, config).run();
}

}  // namespace camp
