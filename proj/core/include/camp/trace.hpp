#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace camp {

/// Internal location index in [0, L).
using Location = std::int32_t;

/// Bijection between external location labels and indices 0..L-1.
class LocationAlphabet {
 public:
  LocationAlphabet() = default;
  /// Throws DataError if fewer than two labels or a label repeats.
  explicit LocationAlphabet(std::vector<std::string> labels);

  /// Labels "L00", "L01", ... zero-padded so lexicographic order matches
  /// index order.
  static LocationAlphabet indexed(std::size_t size);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(Location i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<Location> find(std::string_view label) const;

  bool operator==(const LocationAlphabet& other) const {
    return labels_ == other.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Location> index_;
};

/// One user's visit sequence. Consecutive locations always differ.
struct Trajectory {
  std::string user_id;
  std::vector<Location> locations;
  /// Arrival time (seconds) of each visit, strictly increasing.
  std::optional<std::vector<std::int64_t>> arrival_times;
  /// Dwell time (seconds) at locations[0..n-2].
  std::optional<std::vector<double>> staying_times;

  std::size_t size() const { return locations.size(); }

  /// Throws DataError on any broken invariant.
  void validate(std::size_t alphabet_size) const;

  bool operator==(const Trajectory&) const = default;
};

/// L×L transition counts n_ij with cached row sums n_i.
class TransitionCounts {
 public:
  TransitionCounts() = default;
  explicit TransitionCounts(std::size_t size)
      : size_(size), counts_(size * size, 0), row_sums_(size, 0) {}

  std::size_t size() const { return size_; }
  int operator()(std::size_t i, std::size_t j) const {
    return counts_[i * size_ + j];
  }
  int row_sum(std::size_t i) const { return row_sums_[i]; }
  int total() const { return total_; }
  bool empty() const { return total_ == 0; }
  std::span<const int> row(std::size_t i) const {
    return {counts_.data() + i * size_, size_};
  }

  void add(std::size_t i, std::size_t j, int n = 1) {
    counts_[i * size_ + j] += n;
    row_sums_[i] += n;
    total_ += n;
  }

  TransitionCounts& operator+=(const TransitionCounts& other);
  TransitionCounts& operator-=(const TransitionCounts& other);
  friend TransitionCounts operator+(TransitionCounts a,
                                    const TransitionCounts& b) {
    return a += b;
  }

  bool operator==(const TransitionCounts&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<int> counts_;
  std::vector<int> row_sums_;
  int total_ = 0;
};

/// Counts transitions x_t -> x_{t+1} among the first `upto` locations
/// (whole trajectory when absent).
TransitionCounts count_transitions(const Trajectory& trajectory,
                                   std::size_t alphabet_size,
                                   std::optional<std::size_t> upto = {});

TransitionCounts count_transitions(std::span<const Location> locations,
                                   std::size_t alphabet_size);

/// A location alphabet plus one trajectory per user.
struct TraceSet {
  LocationAlphabet alphabet;
  std::vector<Trajectory> trajectories;

  std::size_t num_users() const { return trajectories.size(); }
  std::size_t num_locations() const { return alphabet.size(); }

  /// Index of `user_id`; throws DataError when unknown.
  std::size_t user_index(std::string_view user_id) const;

  std::vector<TransitionCounts> counts() const;

  void validate() const;

  bool operator==(const TraceSet&) const = default;
};

}  // namespace camp
