#include "camp/log_gamma.hpp"

#include <cmath>
#include <vector>

namespace camp {
namespace detail {
namespace {

std::vector<double> build_table() {
  std::vector<double> t(kLogGammaTableSize);
  t[0] = INFINITY;
  for (std::size_t k = 1; k < kLogGammaTableSize; ++k) {
    t[k] = std::lgamma(static_cast<double>(k));
  }
  return t;
}

const std::vector<double>& table() {
  static const std::vector<double> t = build_table();
  return t;
}

}  // namespace

const double* const kLogGammaTable = table().data();

double log_rising_slow(double x, int n) {
  if (n <= 4) {
    double product = x;
    for (int i = 1; i < n; ++i) product *= x + i;
    return std::log(product);
  }
  return std::lgamma(x + n) - std::lgamma(x);
}

}  // namespace detail

double log_gamma(double x) {
  if (x >= 1.0 && x < static_cast<double>(detail::kLogGammaTableSize)) {
    const auto k = static_cast<std::size_t>(x);
    if (static_cast<double>(k) == x) return detail::table()[k];
  }
  return std::lgamma(x);
}

}  // namespace camp
