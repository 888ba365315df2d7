#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "camp/matrix.hpp"
#include "camp/trace.hpp"

namespace camp {

/// Transition pseudo-counts A_ij stacked on the uniform Dirichlet(1,...,1)
/// row prior. A component with pseudo-counts A has row densities
/// Dirichlet(1 + A_i1, ..., 1 + A_iL).
class PseudoCounts {
 public:
  PseudoCounts() = default;
  explicit PseudoCounts(std::size_t size)
      : size_(size), counts_(size * size, 0.0), row_sums_(size, 0.0) {}

  std::size_t size() const { return size_; }
  double operator()(std::size_t i, std::size_t j) const {
    return counts_[i * size_ + j];
  }
  double row_sum(std::size_t i) const { return row_sums_[i]; }

  /// Throws ConfigError on a negative entry.
  void set(std::size_t i, std::size_t j, double value);
  PseudoCounts& operator+=(const TransitionCounts& counts);

  bool operator==(const PseudoCounts&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<double> counts_;
  std::vector<double> row_sums_;
};

struct MixtureComponent {
  double weight = 1.0;
  PseudoCounts pseudo;
};

/// Base measure on kernels as a finite mixture of Dirichlet-product
/// components.
class MixtureBase {
 public:
  MixtureBase() = default;
  /// Weights are renormalized; throws ConfigError if empty, a weight is not
  /// positive, or sizes disagree.
  MixtureBase(std::size_t size, std::vector<MixtureComponent> components);

  /// One component with zero pseudo-counts: the uniform measure on kernels.
  static MixtureBase uniform(std::size_t size);

  std::size_t size() const { return size_; }
  std::size_t num_components() const { return components_.size(); }
  const std::vector<MixtureComponent>& components() const {
    return components_;
  }
  const MixtureComponent& component(std::size_t m) const {
    return components_[m];
  }

 private:
  std::size_t size_ = 0;
  std::vector<MixtureComponent> components_;
};

/// Row-stochastic L×L transition kernel estimate.
class KernelEstimate {
 public:
  KernelEstimate() = default;
  explicit KernelEstimate(Matrix<double> theta) : theta_(std::move(theta)) {}

  static KernelEstimate uniform(std::size_t size);

  std::size_t size() const { return theta_.rows(); }
  double operator()(std::size_t i, std::size_t j) const {
    return theta_(i, j);
  }
  const Matrix<double>& matrix() const { return theta_; }

  /// argmax_j θ_ij, smallest index on ties.
  Location argmax(Location i) const;

 private:
  Matrix<double> theta_;
};

struct PruneLimits {
  std::size_t max_components = 512;
  double min_weight = 1e-10;
};

/// log ∫ P_θ(x) Dir_A(dθ) for data with transition counts `counts` under
/// the component with pseudo-counts `pseudo`:
///   Σ_i [ lgΓ(L+A_i) − lgΓ(L+A_i+n_i) + Σ_j (lgΓ(1+A_ij+n_ij) − lgΓ(1+A_ij)) ].
/// The uniform normalizer Γ(L) per row is included, so this is a true log
/// probability of the transition sequence.
double log_marginal(const TransitionCounts& counts, const PseudoCounts& pseudo);

/// log_marginal(counts, pseudo + offset) without materializing the sum.
double log_marginal(const TransitionCounts& counts, const PseudoCounts& pseudo,
                    const TransitionCounts& offset);

/// log Σ_m w_m exp(log_marginal(counts, A_m)).
double log_mixture_marginal(const TransitionCounts& counts,
                            const MixtureBase& base);

/// Posterior responsibilities of the base components given `counts`.
std::vector<double> responsibilities(const TransitionCounts& counts,
                                     const MixtureBase& base);

/// E[θ | counts] under `base`.
KernelEstimate posterior_mean(const TransitionCounts& counts,
                              const MixtureBase& base);

/// Posterior base measure P_θ(x) G(dθ) / ∫ P_θ(x) G(dθ).
MixtureBase condition(const MixtureBase& base, const TransitionCounts& counts);

/// Keeps at most `max_components` of the heaviest components whose weight is
/// at least `min_weight` (always at least the heaviest one) and renormalizes.
MixtureBase prune(const MixtureBase& base, std::size_t max_components,
                  double min_weight);
inline MixtureBase prune(const MixtureBase& base, const PruneLimits& limits) {
  return prune(base, limits.max_components, limits.min_weight);
}

/// log Σ exp(values) with max shift; -inf for an empty span.
double log_sum_exp(std::span<const double> values);

}  // namespace camp
