#include "camp/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "camp/errors.hpp"
#include "camp/log_gamma.hpp"

namespace camp {

void PseudoCounts::set(std::size_t i, std::size_t j, double value) {
  if (!(value >= 0.0)) throw ConfigError("pseudo-counts must be non-negative");
  double& slot = counts_[i * size_ + j];
  row_sums_[i] += value - slot;
  slot = value;
}

PseudoCounts& PseudoCounts::operator+=(const TransitionCounts& counts) {
  for (std::size_t i = 0; i < size_; ++i) {
    if (counts.row_sum(i) == 0) continue;
    const auto row = counts.row(i);
    for (std::size_t j = 0; j < size_; ++j) counts_[i * size_ + j] += row[j];
    row_sums_[i] += counts.row_sum(i);
  }
  return *this;
}

MixtureBase::MixtureBase(std::size_t size, std::vector<MixtureComponent> components)
    : size_(size), components_(std::move(components)) {
  if (components_.empty()) throw ConfigError("mixture base needs a component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw ConfigError("mixture weights must be positive and finite");
    }
    if (c.pseudo.size() != size_) throw ConfigError("mixture component size mismatch");
    total += c.weight;
  }
  for (auto& c : components_) c.weight /= total;
}

MixtureBase MixtureBase::uniform(std::size_t size) {
  return MixtureBase(size, {MixtureComponent{1.0, PseudoCounts(size)}});
}

KernelEstimate KernelEstimate::uniform(std::size_t size) {
  return KernelEstimate(Matrix<double>(size, size, 1.0 / static_cast<double>(size)));
}

Location KernelEstimate::argmax(Location i) const {
  const auto row = theta_.row(i);
  return static_cast<Location>(std::max_element(row.begin(), row.end()) - row.begin());
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

double log_marginal(const TransitionCounts& counts, const PseudoCounts& pseudo) {
  const std::size_t L = counts.size();
  const double dim = static_cast<double>(L);
  double total = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const int n_i = counts.row_sum(i);
    if (n_i == 0) continue;
    total -= log_rising(dim + pseudo.row_sum(i), n_i);
    const auto row = counts.row(i);
    for (std::size_t j = 0; j < L; ++j) {
      if (row[j] != 0) total += log_rising(1.0 + pseudo(i, j), row[j]);
    }
  }
  return total;
}

double log_marginal(const TransitionCounts& counts, const PseudoCounts& pseudo,
                    const TransitionCounts& offset) {
  const std::size_t L = counts.size();
  const double dim = static_cast<double>(L);
  double total = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const int n_i = counts.row_sum(i);
    if (n_i == 0) continue;
    total -= log_rising(dim + pseudo.row_sum(i) + offset.row_sum(i), n_i);
    const auto row = counts.row(i);
    const auto extra = offset.row(i);
    for (std::size_t j = 0; j < L; ++j) {
      if (row[j] != 0) total += log_rising(1.0 + pseudo(i, j) + extra[j], row[j]);
    }
  }
  return total;
}

namespace {

std::vector<double> log_posterior_weights(const TransitionCounts& counts,
                                          const MixtureBase& base) {
  std::vector<double> logs;
  logs.reserve(base.num_components());
  for (const auto& c : base.components()) {
    logs.push_back(std::log(c.weight) + log_marginal(counts, c.pseudo));
  }
  return logs;
}

}  // namespace

double log_mixture_marginal(const TransitionCounts& counts, const MixtureBase& base) {
  if (counts.empty()) return 0.0;
  return log_sum_exp(log_posterior_weights(counts, base));
}

std::vector<double> responsibilities(const TransitionCounts& counts,
                                     const MixtureBase& base) {
  auto logs = log_posterior_weights(counts, base);
  const double norm = log_sum_exp(logs);
  for (double& v : logs) v = std::exp(v - norm);
  return logs;
}

KernelEstimate posterior_mean(const TransitionCounts& counts, const MixtureBase& base) {
  const std::size_t L = base.size();
  if (counts.size() != L) throw ConfigError("posterior_mean: size mismatch");
  const double dim = static_cast<double>(L);
  const auto resp = responsibilities(counts, base);
  Matrix<double> theta(L, L, 0.0);
  for (std::size_t m = 0; m < base.num_components(); ++m) {
    const double r = resp[m];
    if (r == 0.0) continue;
    const auto& pseudo = base.component(m).pseudo;
    for (std::size_t i = 0; i < L; ++i) {
      const double denom = dim + pseudo.row_sum(i) + counts.row_sum(i);
      const auto row = counts.row(i);
      for (std::size_t j = 0; j < L; ++j) {
        theta(i, j) += r * (1.0 + pseudo(i, j) + row[j]) / denom;
      }
    }
  }
  return KernelEstimate(std::move(theta));
}

MixtureBase condition(const MixtureBase& base, const TransitionCounts& counts) {
  if (counts.empty()) return base;
  const auto resp = responsibilities(counts, base);
  std::vector<MixtureComponent> components;
  components.reserve(base.num_components());
  for (std::size_t m = 0; m < base.num_components(); ++m) {
    if (resp[m] <= 0.0) continue;
    MixtureComponent c{resp[m], base.component(m).pseudo};
    c.pseudo += counts;
    components.push_back(std::move(c));
  }
  return MixtureBase(base.size(), std::move(components));
}

MixtureBase prune(const MixtureBase& base, std::size_t max_components,
                  double min_weight) {
  if (max_components < 1) throw ConfigError("prune: max_components must be >= 1");
  const auto& all = base.components();
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return all[a].weight > all[b].weight;
  });
  std::vector<MixtureComponent> kept;
  for (std::size_t k = 0; k < order.size() && kept.size() < max_components; ++k) {
    const auto& c = all[order[k]];
    if (k > 0 && c.weight < min_weight) break;
    kept.push_back(c);
  }
  if (kept.size() == all.size()) return base;
  return MixtureBase(base.size(), std::move(kept));
}

}  // namespace camp
