#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "camp/dirichlet.hpp"
#include "camp/format.hpp"
#include "camp/evaluation.hpp"
#include "camp/lemma.hpp"
#include "camp/matrix.hpp"
#include "camp/predictors.hpp"
#include "camp/trace.hpp"

namespace camp {

/// Maximum-likelihood kernel n_ij / n_i of one trajectory, with the Markov
/// predictor's fallback for unvisited rows.
class MleKernel {
 public:
  MleKernel(const Trajectory& trajectory, std::size_t alphabet_size);
  Location argmax(Location i) const { return predict_markov(stats_, i); }

 private:
  MarkovStats stats_;
};

/// Fraction of steps t = 2..n where x_t equals the kernel's argmax from
/// x_{t-1}. Throws DataError if the trajectory has fewer than two visits.
double empirical_accuracy(const Trajectory& trajectory,
                          const KernelEstimate& theta);
double empirical_accuracy(const Trajectory& trajectory,
                          const MleKernel& theta);

/// sim(u, v): accuracy of v's MLE kernel on u over that of u's own, clamped
/// to [0, 1]. nullopt when u's own accuracy is 0 or u has < 2 visits.
/// `clamped` is set when the raw ratio exceeded 1.
std::optional<double> similarity(std::size_t u, std::size_t v,
                                 const TraceSet& traces,
                                 bool* clamped = nullptr);

struct SimilarityMatrix {
  Matrix<std::optional<double>> values;
  std::size_t clamped = 0;

  /// Users with some other user of similarity strictly above `threshold`.
  std::vector<bool> mobility_friendly(double threshold = 0.5) const;
};

SimilarityMatrix similarity_matrix(const TraceSet& traces);

/// Population filter: nullptr or empty means everyone.
using Population = std::span<const bool>;

struct RatioValue {
  std::optional<double> value;  // nullopt: empty population
  std::size_t n = 0;            // terms in the denominator
};

/// Accurate predictions over all events with cutoff before `time`.
RatioValue capr_time(const PredictionLog& log, std::size_t predictor,
                     std::int64_t time, Population population = {});

/// Accuracy over steps 2..t of users whose trajectory has at least t visits.
RatioValue capr(const PredictionLog& log, std::size_t predictor,
                std::size_t t, Population population = {});

/// Mean of n^u_{x_{t-1}, x̂_t} / n^u_{x_{t-1}} over users with >= t visits,
/// using full-trajectory counts. Users whose full row count is zero are
/// excluded and counted in `excluded`.
RatioValue iapr(const PredictionLog& log, const TraceSet& traces,
                std::size_t predictor, std::size_t t,
                Population population = {}, std::size_t* excluded = nullptr);

/// Size of {v : z Σ_i gamma(v,i) > 1/U}, z normalizing aggregates to 1.
std::size_t u_similar_count(const SimilarityWeights& weights);

struct StayErrorTable {
  std::vector<double> errors;  // ascending |ŝ − s|
  std::size_t failures = 0;    // events without an estimate
  /// Empirical quantile (nearest rank); nullopt without errors.
  std::optional<double> quantile(double q) const;
};

StayErrorTable staying_time_error(std::span<const std::optional<double>> estimates,
                                  std::span<const double> truths);

/// Row of the metric CSV `metric,predictor,population,x,value,n`.
struct MetricRow {
  std::string metric;
  std::string predictor;
  std::string population;
  double x = 0.0;
  std::optional<double> value;
  std::size_t n = 0;
};

void write_metric_csv(std::ostream& out, std::span<const MetricRow> rows);

}  // namespace camp
