#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "camp/engine.hpp"
#include "camp/predictors.hpp"
#include "camp/trace.hpp"

namespace camp {

struct EvalConfig {
  std::vector<PredictorKind> predictors{PredictorKind::kMarkov};
  RefitSchedule schedule;
  CampConfig camp;
  bool staying_times = false;
};

/// One streamed prediction of x^u_t at cutoff d^u_t.
struct PredictionEvent {
  std::size_t user = 0;
  std::size_t t = 0;  // 1-based index of the predicted visit
  std::int64_t cutoff = 0;
  Location previous = 0;
  Location actual = 0;
  std::vector<Location> predicted;  // one per configured predictor
  std::vector<std::optional<double>> stay_estimate;
  std::optional<double> stay_truth;

  bool correct(std::size_t predictor) const {
    return predicted[predictor] == actual;
  }
};

struct PredictionLog {
  std::vector<PredictorKind> predictors;
  std::vector<std::size_t> lengths;  // full trajectory length per user
  std::vector<PredictionEvent> events;
  std::size_t camp_fits = 0;
  std::size_t stay_budget_failures = 0;
  std::string schedule;
};

/// Streams every (u, t >= 2) event in arrival order (ties by user, then t)
/// and queries each predictor with the data visible before d^u_t. Requires
/// arrival times on every trajectory.
PredictionLog run_streaming(const TraceSet& traces, const EvalConfig& config);

}  // namespace camp
