#pragma once

#include <stdexcept>
#include <string>

namespace camp {

/// Input data that violates a format or model invariant (bad CSV row,
/// non-monotone timestamps, out-of-range location, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exact enumeration would exceed its work budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace camp
