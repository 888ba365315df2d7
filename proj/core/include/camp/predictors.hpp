#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "camp/engine.hpp"
#include "camp/trace.hpp"

namespace camp {

enum class PredictorKind { kMarkov, kMarkovO2, kAgg, kAggC, kCamp, kCampC };

std::string_view to_string(PredictorKind kind);
/// Accepts markov|markov2|agg|aggc|camp|campc; throws ConfigError otherwise.
PredictorKind parse_predictor(std::string_view name);

/// Predict x^u_t (1-based t >= 2) from data strictly before `cutoff`
/// (normally the arrival time d^u_t).
struct PredictionRequest {
  std::size_t user = 0;
  std::size_t t = 2;
  std::int64_t cutoff = std::numeric_limits<std::int64_t>::max();
};

/// Number of leading visits of each user visible to a predictor of `kind`.
/// The target user sees t-1 visits; others see visits before the cutoff
/// (AGG/CAMP), their full trajectory (AGG^C/CAMP^C) or nothing (Markov).
std::vector<std::size_t> visible_lengths(const TraceSet& traces,
                                         const PredictionRequest& request,
                                         PredictorKind kind);

std::vector<TransitionCounts> visible_counts(const TraceSet& traces,
                                             const PredictionRequest& request,
                                             PredictorKind kind);

/// Transition counts plus visit frequencies of a trajectory prefix.
struct MarkovStats {
  TransitionCounts counts;
  std::vector<int> visits;

  explicit MarkovStats(std::size_t alphabet_size = 0)
      : counts(alphabet_size), visits(alphabet_size, 0) {}
  static MarkovStats from_prefix(std::span<const Location> prefix,
                                 std::size_t alphabet_size);
  MarkovStats& operator+=(const MarkovStats& other);
  /// Appends one more visit after `previous` (none for the first visit).
  void observe(std::optional<Location> previous, Location next);
};

/// argmax_j n_ij; an empty row falls back to the most visited location;
/// ties go to the smallest index; no data at all yields location 0.
Location predict_markov(const MarkovStats& stats, Location current);

/// Order-2 counts (a, b) -> c with order-1 fallback.
class SecondOrderStats {
 public:
  explicit SecondOrderStats(std::size_t alphabet_size = 0)
      : size_(alphabet_size), first_(alphabet_size) {}
  static SecondOrderStats from_prefix(std::span<const Location> prefix,
                                      std::size_t alphabet_size);
  void observe(Location next);
  const MarkovStats& first_order() const { return first_; }
  int count(Location a, Location b, Location c) const;
  /// Predicts the successor of the last two observed visits.
  Location predict() const;

 private:
  std::size_t size_;
  MarkovStats first_;
  std::vector<Location> history_;
  // (a·L + b) -> successor counts
  std::unordered_map<std::int64_t, std::vector<int>> successors_;
};

/// Markov-O(2) prediction for the last visit of `prefix`.
Location predict_markov2(std::span<const Location> prefix,
                         std::size_t alphabet_size);

/// Pools every user's visible statistics and applies the order-1 rule.
Location predict_agg(std::span<const MarkovStats> visible, Location current);

/// Fits CAMP on the visible prefixes and predicts argmax_j θ̂^u_{current,j}.
Location predict_camp(const TraceSet& traces, const PredictionRequest& request,
                      PredictorKind kind, const CampConfig& config);

/// How often model-based predictors are refitted while streaming. An epoch
/// of E means a refit after every E processed events; epoch 0 means never
/// refit after the first fit.
struct RefitSchedule {
  std::size_t epoch = 25;

  static RefitSchedule per_event() { return {1}; }
  static RefitSchedule per_epoch(std::size_t events);
  static RefitSchedule static_model() { return {0}; }

  bool is_static() const { return epoch == 0; }
  bool due(std::size_t events_since_fit) const {
    return !is_static() && events_since_fit >= epoch;
  }
  std::string describe() const;
};

/// "event" | "static" | positive integer E. Throws ConfigError for E < 1.
RefitSchedule refit_schedule(std::string_view policy);

}  // namespace camp
