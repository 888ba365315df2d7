#include "camp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <utility>

#include "camp/errors.hpp"

namespace camp {

MleKernel::MleKernel(const Trajectory& trajectory, std::size_t alphabet_size)
    : stats_(MarkovStats::from_prefix(trajectory.locations, alphabet_size)) {}

namespace {

template <class Kernel>
double accuracy_of(const Trajectory& trajectory, const Kernel& theta) {
  const auto& x = trajectory.locations;
  if (x.size() < 2) {
    throw DataError("empirical accuracy of user '" + trajectory.user_id +
                    "' needs at least two visits");
  }
  std::size_t hits = 0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    if (theta.argmax(x[t - 1]) == x[t]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(x.size() - 1);
}

bool included(Population population, std::size_t user) {
  return population.empty() || population[user];
}

}  // namespace

double empirical_accuracy(const Trajectory& trajectory, const KernelEstimate& theta) {
  return accuracy_of(trajectory, theta);
}

double empirical_accuracy(const Trajectory& trajectory, const MleKernel& theta) {
  return accuracy_of(trajectory, theta);
}

namespace {

std::optional<double> ratio(double accuracy, double own, bool* clamped) {
  if (clamped) *clamped = false;
  if (!(own > 0.0)) return std::nullopt;
  double r = accuracy / own;
  if (r > 1.0) {
    r = 1.0;
    if (clamped) *clamped = true;
  }
  return r;
}

}  // namespace

std::optional<double> similarity(std::size_t u, std::size_t v, const TraceSet& traces,
                                 bool* clamped) {
  if (clamped) *clamped = false;
  const auto& tu = traces.trajectories.at(u);
  const auto& tv = traces.trajectories.at(v);
  if (tu.size() < 2) return std::nullopt;
  const std::size_t L = traces.num_locations();
  const double own = empirical_accuracy(tu, MleKernel(tu, L));
  return ratio(empirical_accuracy(tu, MleKernel(tv, L)), own, clamped);
}

std::vector<bool> SimilarityMatrix::mobility_friendly(double threshold) const {
  std::vector<bool> out(values.rows(), false);
  for (std::size_t u = 0; u < values.rows(); ++u) {
    for (std::size_t v = 0; v < values.cols(); ++v) {
      if (v != u && values(u, v) && *values(u, v) > threshold) {
        out[u] = true;
        break;
      }
    }
  }
  return out;
}

SimilarityMatrix similarity_matrix(const TraceSet& traces) {
  const std::size_t U = traces.num_users();
  const std::size_t L = traces.num_locations();
  std::vector<MleKernel> kernels;
  kernels.reserve(U);
  for (const auto& trajectory : traces.trajectories) kernels.emplace_back(trajectory, L);
  SimilarityMatrix out{Matrix<std::optional<double>>(U, U, std::nullopt), 0};
  for (std::size_t u = 0; u < U; ++u) {
    const auto& tu = traces.trajectories[u];
    if (tu.size() < 2) continue;
    const double own = empirical_accuracy(tu, kernels[u]);
    for (std::size_t v = 0; v < U; ++v) {
      bool clamped = false;
      out.values(u, v) = ratio(empirical_accuracy(tu, kernels[v]), own, &clamped);
      if (clamped) ++out.clamped;
    }
  }
  return out;
}

RatioValue capr_time(const PredictionLog& log, std::size_t predictor, std::int64_t time,
                     Population population) {
  std::size_t hits = 0;
  RatioValue out;
  for (const auto& event : log.events) {
    if (event.cutoff >= time || !included(population, event.user)) continue;
    ++out.n;
    if (event.correct(predictor)) ++hits;
  }
  if (out.n > 0) out.value = static_cast<double>(hits) / static_cast<double>(out.n);
  return out;
}

RatioValue capr(const PredictionLog& log, std::size_t predictor, std::size_t t,
                Population population) {
  std::size_t hits = 0;
  RatioValue out;
  if (t < 2) return out;
  for (std::size_t u = 0; u < log.lengths.size(); ++u) {
    if (log.lengths[u] >= t && included(population, u)) out.n += t - 1;
  }
  for (const auto& event : log.events) {
    if (event.t > t || log.lengths[event.user] < t || !included(population, event.user)) continue;
    if (event.correct(predictor)) ++hits;
  }
  if (out.n > 0) out.value = static_cast<double>(hits) / static_cast<double>(out.n);
  return out;
}

RatioValue iapr(const PredictionLog& log, const TraceSet& traces, std::size_t predictor,
                std::size_t t, Population population, std::size_t* excluded) {
  if (excluded) *excluded = 0;
  RatioValue out;
  double sum = 0.0;
  const std::size_t L = traces.num_locations();
  for (const auto& event : log.events) {
    if (event.t != t || !included(population, event.user)) continue;
    const auto counts = count_transitions(traces.trajectories[event.user], L);
    const int row = counts.row_sum(event.previous);
    if (row == 0) {
      if (excluded) ++*excluded;
      continue;
    }
    sum += static_cast<double>(counts(event.previous, event.predicted[predictor])) / row;
    ++out.n;
  }
  if (out.n > 0) out.value = sum / static_cast<double>(out.n);
  return out;
}

std::size_t u_similar_count(const SimilarityWeights& weights) {
  const auto aggregate = weights.aggregate();
  double total = 0.0;
  for (double a : aggregate) total += a;
  if (!(total > 0.0)) return 0;
  const double share = 1.0 / static_cast<double>(aggregate.size());
  std::size_t count = 0;
  for (double a : aggregate) {
    if (a / total > share) ++count;
  }
  return count;
}

std::optional<double> StayErrorTable::quantile(double q) const {
  if (errors.empty()) return std::nullopt;
  const double n = static_cast<double>(errors.size());
  auto rank = static_cast<std::size_t>(std::ceil(std::clamp(q, 0.0, 1.0) * n));
  if (rank == 0) rank = 1;
  return errors[rank - 1];
}

StayErrorTable staying_time_error(std::span<const std::optional<double>> estimates,
                                  std::span<const double> truths) {
  if (estimates.size() != truths.size()) {
    throw ConfigError("staying-time error needs one truth per estimate");
  }
  StayErrorTable out;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    if (estimates[k]) {
      out.errors.push_back(std::abs(*estimates[k] - truths[k]));
    } else {
      ++out.failures;
    }
  }
  std::sort(out.errors.begin(), out.errors.end());
  return out;
}

void write_metric_csv(std::ostream& out, std::span<const MetricRow> rows) {
  out << "metric,predictor,population,x,value,n\n";
  for (const auto& row : rows) {
    out << row.metric << ',' << row.predictor << ',' << row.population << ','
        << format_number(row.x) << ',';
    if (row.value) out << format_number(*row.value);
    out << ',' << row.n << '\n';
  }
}

}  // namespace camp
