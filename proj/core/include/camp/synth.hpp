#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "camp/matrix.hpp"
#include "camp/rng.hpp"
#include "camp/trace.hpp"

namespace camp {

using Kernel = Matrix<double>;

enum class SynthMode { kPerfectClusters, kDpDraw, kDirichletNoise };

/// Per-user trajectory length drawn uniformly from [min, max].
struct LengthDistribution {
  std::size_t min = 20;
  std::size_t max = 20;
};

struct SyntheticPrior {
  SynthMode mode = SynthMode::kPerfectClusters;
  std::size_t locations = 10;
  /// Number of cluster centers (perfect / noise modes).
  std::size_t clusters = 3;
  /// Cluster centers; drawn uniformly on the kernel space when empty.
  std::vector<Kernel> centers;
  /// DP concentration and stick-breaking truncation (dp mode).
  double alpha = 1.0;
  std::size_t truncation = 100;
  /// Noise mode: user rows ~ Dirichlet(center row / spread).
  double spread = 0.1;
  LengthDistribution length;
  /// Mean stay (seconds); per-location means are drawn in [0.5, 1.5]× this.
  std::optional<double> stay_mean;

  void validate() const;
};

struct SyntheticData {
  TraceSet traces;
  /// Kernel drawn for each user.
  std::vector<Kernel> drawn;
  /// Law of the generated steps: drawn kernel with the diagonal removed and
  /// rows renormalized.
  std::vector<Kernel> effective;
  std::vector<int> labels;            // atom index per user
  std::vector<Kernel> atoms;          // cluster centers / DP atoms
  std::vector<double> atom_weights;   // prior mass of each atom
};

/// Draws kernels per the prior, a length per user, a uniform initial
/// location, then walks the chain with self-transitions rejected.
SyntheticData generate(const SyntheticPrior& prior, std::size_t num_users,
                       std::uint64_t seed);

/// A kernel with every row drawn uniformly from the simplex.
Kernel uniform_kernel(std::size_t size, Rng& rng);

/// Diagonal removed, rows renormalized. Throws DataError when a row has no
/// off-diagonal mass.
Kernel off_diagonal(const Kernel& kernel);

/// Walks `kernel` (self-transitions rejected) for `length` visits.
std::vector<Location> walk(const Kernel& kernel, Location start,
                           std::size_t length, Rng& rng);

/// Stick-breaking weights β_c = b_c Π_{i<c}(1 − b_i), b ~ Beta(1, alpha);
/// the last weight absorbs the remaining stick.
std::vector<double> stick_breaking(double alpha, std::size_t truncation,
                                   Rng& rng);

}  // namespace camp
