#pragma once

#include <cstddef>

namespace camp {

namespace detail {
inline constexpr std::size_t kLogGammaTableSize = 1 << 17;
/// log Γ(k) for k in [1, kLogGammaTableSize); entry 0 is +inf.
extern const double* const kLogGammaTable;
double log_rising_slow(double x, int n);
}  // namespace detail

/// log Γ(x) for x > 0. Integral arguments below a fixed bound are served
/// from a precomputed table; every pseudo-count built from transition
/// counts is integral, so the Gibbs inner loop never calls std::lgamma.
double log_gamma(double x);

/// log Γ(x + n) − log Γ(x), the log rising factorial, for x > 0 and n ≥ 0.
inline double log_rising(double x, int n) {
  if (n == 0) return 0.0;
  if (x >= 1.0 && x + n < static_cast<double>(detail::kLogGammaTableSize)) {
    const auto k = static_cast<std::size_t>(x);
    if (static_cast<double>(k) == x) {
      return detail::kLogGammaTable[k + static_cast<std::size_t>(n)] - detail::kLogGammaTable[k];
    }
  }
  return detail::log_rising_slow(x, n);
}

}  // namespace camp
