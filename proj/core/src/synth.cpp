#include "camp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "camp/errors.hpp"

namespace camp {

namespace {

double exponential(Rng& rng, double mean) { return -mean * std::log1p(-uniform01(rng)); }

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

std::size_t sample_discrete(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double r = uniform01(rng) * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    r -= weights[k];
    if (r < 0.0) return k;
  }
  // Rounding left a sliver: return the last index with positive weight.
  for (std::size_t k = weights.size(); k-- > 0;) {
    if (weights[k] > 0.0) return k;
  }
  return 0;
}

void check_kernel(const Kernel& kernel, std::size_t size) {
  if (kernel.rows() != size || kernel.cols() != size) {
    throw ConfigError("cluster kernel is " + std::to_string(kernel.rows()) + "x" +
                      std::to_string(kernel.cols()) + ", expected " + std::to_string(size) +
                      "x" + std::to_string(size));
  }
  for (std::size_t i = 0; i < size; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      if (!(kernel(i, j) >= 0.0)) throw ConfigError("cluster kernel has a negative entry");
      sum += kernel(i, j);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ConfigError("cluster kernel row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
}

std::string user_name(std::size_t u, std::size_t users) {
  const int width = static_cast<int>(std::to_string(users > 0 ? users - 1 : 0).size());
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "u%0*zu", width, u);
  return buffer;
}

}  // namespace

void SyntheticPrior::validate() const {
  if (locations < 2) throw ConfigError("synthetic traces need at least two locations");
  if (clusters < 1) throw ConfigError("at least one cluster is required");
  if (mode != SynthMode::kDpDraw && !centers.empty() && centers.size() != clusters) {
    throw ConfigError("got " + std::to_string(centers.size()) + " cluster kernels for " +
                      std::to_string(clusters) + " clusters");
  }
  for (const auto& center : centers) {
    check_kernel(center, locations);
    off_diagonal(center);
  }
  if (!(alpha > 0.0)) throw ConfigError("DP concentration must be positive");
  if (truncation < 1) throw ConfigError("stick-breaking truncation must be at least 1");
  if (!(spread > 0.0)) throw ConfigError("noise spread must be positive");
  if (length.min < 1 || length.min > length.max) {
    throw ConfigError("trajectory length range must satisfy 1 <= min <= max");
  }
  if (stay_mean && !(*stay_mean > 0.0)) throw ConfigError("mean stay must be positive");
}

Kernel uniform_kernel(std::size_t size, Rng& rng) {
  Kernel kernel(size, size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      kernel(i, j) = exponential(rng, 1.0);
      sum += kernel(i, j);
    }
    for (std::size_t j = 0; j < size; ++j) kernel(i, j) /= sum;
  }
  return kernel;
}

Kernel off_diagonal(const Kernel& kernel) {
  const std::size_t L = kernel.rows();
  Kernel out(L, L, 0.0);
  for (std::size_t i = 0; i < L; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      if (j != i) sum += kernel(i, j);
    }
    if (!(sum > 0.0)) {
      throw DataError("kernel row " + std::to_string(i) +
                      " has all its mass on the diagonal; consecutive visits must differ");
    }
    for (std::size_t j = 0; j < L; ++j) {
      if (j != i) out(i, j) = kernel(i, j) / sum;
    }
  }
  return out;
}

std::vector<Location> walk(const Kernel& kernel, Location start, std::size_t length, Rng& rng) {
  const Kernel steps = off_diagonal(kernel);
  std::vector<Location> out;
  if (length == 0) return out;
  out.reserve(length);
  out.push_back(start);
  while (out.size() < length) {
    out.push_back(static_cast<Location>(sample_discrete(steps.row(out.back()), rng)));
  }
  return out;
}

std::vector<double> stick_breaking(double alpha, std::size_t truncation, Rng& rng) {
  std::vector<double> weights(truncation, 0.0);
  double rest = 1.0;
  for (std::size_t c = 0; c + 1 < truncation; ++c) {
    const double b = 1.0 - std::pow(1.0 - uniform01(rng), 1.0 / alpha);
    weights[c] = rest * b;
    rest -= weights[c];
  }
  weights[truncation - 1] = rest;
  return weights;
}

SyntheticData generate(const SyntheticPrior& prior, std::size_t num_users, std::uint64_t seed) {
  prior.validate();
  if (num_users < 1) throw ConfigError("at least one user is required");
  Rng rng = make_rng(seed);
  const std::size_t L = prior.locations;
  SyntheticData data;

  if (prior.mode == SynthMode::kDpDraw) {
    data.atom_weights = stick_breaking(prior.alpha, prior.truncation, rng);
    for (std::size_t c = 0; c < prior.truncation; ++c) data.atoms.push_back(uniform_kernel(L, rng));
  } else {
    data.atoms = prior.centers;
    while (data.atoms.size() < prior.clusters) data.atoms.push_back(uniform_kernel(L, rng));
    data.atom_weights.assign(prior.clusters, 1.0 / static_cast<double>(prior.clusters));
  }
  for (const auto& atom : data.atoms) off_diagonal(atom);

  std::vector<double> stay_means;
  if (prior.stay_mean) {
    for (std::size_t i = 0; i < L; ++i) stay_means.push_back(*prior.stay_mean * (0.5 + uniform01(rng)));
  }

  data.traces.alphabet = LocationAlphabet::indexed(L);
  for (std::size_t u = 0; u < num_users; ++u) {
    const auto label = sample_discrete(data.atom_weights, rng);
    Kernel kernel = data.atoms[label];
    if (prior.mode == SynthMode::kDirichletNoise) {
      for (std::size_t i = 0; i < L; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
          const double shape = std::max(kernel(i, j) / prior.spread, 1e-12);
          std::gamma_distribution<double> gamma(shape, 1.0);
          kernel(i, j) = gamma(rng);
          sum += kernel(i, j);
        }
        double off = sum;
        for (std::size_t j = 0; j < L; ++j) {
          if (j == i) off -= kernel(i, j);
        }
        if (!(off > 0.0)) {
          for (std::size_t j = 0; j < L; ++j) kernel(i, j) = data.atoms[label](i, j);
        } else {
          for (std::size_t j = 0; j < L; ++j) kernel(i, j) /= sum;
        }
      }
    }
    const std::size_t length =
        prior.length.min + uniform_index(rng, prior.length.max - prior.length.min + 1);
    const auto start = static_cast<Location>(uniform_index(rng, L));

    Trajectory trajectory;
    trajectory.user_id = user_name(u, num_users);
    trajectory.locations = walk(kernel, start, length, rng);
    std::vector<std::int64_t> arrivals;
    std::vector<double> stays;
    std::int64_t now = static_cast<std::int64_t>(uniform_index(rng, 86400));
    for (std::size_t t = 0; t < length; ++t) {
      arrivals.push_back(now);
      if (t + 1 == length) break;
      double stay = 0.0;
      if (prior.stay_mean) {
        stay = std::round(exponential(rng, stay_means[trajectory.locations[t]]));
        stays.push_back(stay);
      } else {
        stay = std::round(exponential(rng, 3600.0));
      }
      now += static_cast<std::int64_t>(stay) + 60;
    }
    trajectory.arrival_times = std::move(arrivals);
    if (prior.stay_mean) trajectory.staying_times = std::move(stays);

    data.traces.trajectories.push_back(std::move(trajectory));
    data.effective.push_back(off_diagonal(kernel));
    data.drawn.push_back(std::move(kernel));
    data.labels.push_back(static_cast<int>(label));
  }
  return data;
}

}  // namespace camp
