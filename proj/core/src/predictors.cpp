#include "camp/predictors.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "camp/errors.hpp"

namespace camp {

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kMarkov: return "markov";
    case PredictorKind::kMarkovO2: return "markov2";
    case PredictorKind::kAgg: return "agg";
    case PredictorKind::kAggC: return "aggc";
    case PredictorKind::kCamp: return "camp";
    case PredictorKind::kCampC: return "campc";
  }
  return "unknown";
}

PredictorKind parse_predictor(std::string_view name) {
  for (auto kind : {PredictorKind::kMarkov, PredictorKind::kMarkovO2, PredictorKind::kAgg,
                    PredictorKind::kAggC, PredictorKind::kCamp, PredictorKind::kCampC}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown predictor '" + std::string(name) +
                    "' (expected markov, markov2, agg, aggc, camp or campc)");
}

namespace {

std::size_t visits_before(const Trajectory& trajectory, std::int64_t cutoff) {
  if (cutoff == std::numeric_limits<std::int64_t>::max()) return trajectory.size();
  if (!trajectory.arrival_times) {
    throw DataError("user '" + trajectory.user_id + "' has no arrival times; a finite cutoff needs them");
  }
  const auto& times = *trajectory.arrival_times;
  return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), cutoff) - times.begin());
}

}  // namespace

std::vector<std::size_t> visible_lengths(const TraceSet& traces, const PredictionRequest& request,
                                         PredictorKind kind) {
  if (request.user >= traces.num_users()) throw DataError("prediction request for an unknown user");
  if (request.t < 2) throw ConfigError("prediction index t must be at least 2");
  std::vector<std::size_t> out(traces.num_users(), 0);
  for (std::size_t v = 0; v < traces.num_users(); ++v) {
    const auto& trajectory = traces.trajectories[v];
    if (v == request.user) {
      out[v] = std::min(request.t - 1, trajectory.size());
      continue;
    }
    switch (kind) {
      case PredictorKind::kMarkov:
      case PredictorKind::kMarkovO2: out[v] = 0; break;
      case PredictorKind::kAgg:
      case PredictorKind::kCamp: out[v] = visits_before(trajectory, request.cutoff); break;
      case PredictorKind::kAggC:
      case PredictorKind::kCampC: out[v] = trajectory.size(); break;
    }
  }
  return out;
}

std::vector<TransitionCounts> visible_counts(const TraceSet& traces, const PredictionRequest& request,
                                             PredictorKind kind) {
  const auto lengths = visible_lengths(traces, request, kind);
  std::vector<TransitionCounts> out;
  out.reserve(lengths.size());
  for (std::size_t v = 0; v < lengths.size(); ++v) {
    out.push_back(count_transitions(traces.trajectories[v], traces.num_locations(), lengths[v]));
  }
  return out;
}

MarkovStats MarkovStats::from_prefix(std::span<const Location> prefix, std::size_t alphabet_size) {
  MarkovStats stats(alphabet_size);
  std::optional<Location> previous;
  for (Location x : prefix) {
    stats.observe(previous, x);
    previous = x;
  }
  return stats;
}

MarkovStats& MarkovStats::operator+=(const MarkovStats& other) {
  counts += other.counts;
  for (std::size_t i = 0; i < visits.size(); ++i) visits[i] += other.visits[i];
  return *this;
}

void MarkovStats::observe(std::optional<Location> previous, Location next) {
  ++visits[next];
  if (previous) counts.add(*previous, next);
}

namespace {

template <class Row>
Location first_max(const Row& row) {
  Location best = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = static_cast<Location>(j);
  }
  return best;
}

}  // namespace

Location predict_markov(const MarkovStats& stats, Location current) {
  if (stats.visits.empty()) return 0;
  if (current >= 0 && static_cast<std::size_t>(current) < stats.counts.size() &&
      stats.counts.row_sum(current) > 0) {
    return first_max(stats.counts.row(current));
  }
  return first_max(stats.visits);
}

SecondOrderStats SecondOrderStats::from_prefix(std::span<const Location> prefix,
                                               std::size_t alphabet_size) {
  SecondOrderStats stats(alphabet_size);
  for (Location x : prefix) stats.observe(x);
  return stats;
}

void SecondOrderStats::observe(Location next) {
  const std::size_t n = history_.size();
  if (n >= 2) {
    auto& row = successors_[static_cast<std::int64_t>(history_[n - 2]) * size_ + history_[n - 1]];
    if (row.empty()) row.assign(size_, 0);
    ++row[next];
  }
  first_.observe(n == 0 ? std::nullopt : std::optional<Location>(history_.back()), next);
  history_.push_back(next);
}

int SecondOrderStats::count(Location a, Location b, Location c) const {
  const auto it = successors_.find(static_cast<std::int64_t>(a) * size_ + b);
  return it == successors_.end() ? 0 : it->second[c];
}

Location SecondOrderStats::predict() const {
  if (history_.empty()) return 0;
  const std::size_t n = history_.size();
  if (n >= 2) {
    const auto it = successors_.find(static_cast<std::int64_t>(history_[n - 2]) * size_ + history_[n - 1]);
    if (it != successors_.end()) return first_max(it->second);
  }
  return predict_markov(first_, history_.back());
}

Location predict_markov2(std::span<const Location> prefix, std::size_t alphabet_size) {
  return SecondOrderStats::from_prefix(prefix, alphabet_size).predict();
}

Location predict_agg(std::span<const MarkovStats> visible, Location current) {
  if (visible.empty()) return 0;
  MarkovStats pooled(visible.front().visits.size());
  for (const auto& stats : visible) pooled += stats;
  return predict_markov(pooled, current);
}

Location predict_camp(const TraceSet& traces, const PredictionRequest& request, PredictorKind kind,
                      const CampConfig& config) {
  if (kind != PredictorKind::kCamp && kind != PredictorKind::kCampC) {
    throw ConfigError("predict_camp needs the camp or campc predictor kind");
  }
  const auto counts = visible_counts(traces, request, kind);
  std::vector<std::string> users;
  for (const auto& trajectory : traces.trajectories) users.push_back(trajectory.user_id);
  const auto model = fit(counts, std::move(users), config);
  const auto& trajectory = traces.trajectories[request.user];
  if (trajectory.size() == 0) return 0;
  const Location current = trajectory.locations[std::min(request.t - 1, trajectory.size()) - 1];
  return model.theta[request.user].argmax(current);
}

RefitSchedule RefitSchedule::per_epoch(std::size_t events) {
  if (events < 1) throw ConfigError("refit epoch must be at least 1");
  return {events};
}

std::string RefitSchedule::describe() const {
  if (is_static()) return "static";
  if (epoch == 1) return "event";
  return "epoch:" + std::to_string(epoch);
}

RefitSchedule refit_schedule(std::string_view policy) {
  if (policy == "event") return RefitSchedule::per_event();
  if (policy == "static" || policy == "inf") return RefitSchedule::static_model();
  long long value = 0;
  const auto [end, ec] = std::from_chars(policy.data(), policy.data() + policy.size(), value);
  if (ec != std::errc() || end != policy.data() + policy.size()) {
    throw ConfigError("refit policy must be 'event', 'static' or a positive integer, got '" +
                      std::string(policy) + "'");
  }
  if (value < 1) throw ConfigError("refit epoch must be at least 1");
  return RefitSchedule::per_epoch(static_cast<std::size_t>(value));
}

}  // namespace camp
