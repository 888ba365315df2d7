#include "camp/trace.hpp"

#include <cstdio>
#include <string>
#include <unordered_set>

#include "camp/errors.hpp"

namespace camp {

LocationAlphabet::LocationAlphabet(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw DataError("location alphabet needs at least 2 locations, got " +
                    std::to_string(labels_.size()));
  }
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], static_cast<Location>(i)).second) {
      throw DataError("duplicate location label '" + labels_[i] + "'");
    }
  }
}

LocationAlphabet LocationAlphabet::indexed(std::size_t size) {
  const int width = size <= 100 ? 2 : static_cast<int>(std::to_string(size - 1).size());
  std::vector<std::string> labels;
  labels.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "L%0*zu", width, i);
    labels.emplace_back(buf);
  }
  return LocationAlphabet(std::move(labels));
}

std::optional<Location> LocationAlphabet::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Trajectory::validate(std::size_t alphabet_size) const {
  const auto where = [this] { return "trajectory of user '" + user_id + "'"; };
  for (std::size_t t = 0; t < locations.size(); ++t) {
    if (locations[t] < 0 || static_cast<std::size_t>(locations[t]) >= alphabet_size) {
      throw DataError(where() + ": location index out of range at visit " +
                      std::to_string(t + 1));
    }
    if (t > 0 && locations[t] == locations[t - 1]) {
      throw DataError(where() + ": consecutive visits " + std::to_string(t) +
                      " and " + std::to_string(t + 1) + " are the same location");
    }
  }
  if (arrival_times) {
    if (arrival_times->size() != locations.size()) {
      throw DataError(where() + ": arrival_times size mismatch");
    }
    for (std::size_t t = 1; t < arrival_times->size(); ++t) {
      if ((*arrival_times)[t] <= (*arrival_times)[t - 1]) {
        throw DataError(where() + ": arrival times not strictly increasing");
      }
    }
  }
  if (staying_times) {
    const std::size_t expected = locations.empty() ? 0 : locations.size() - 1;
    if (staying_times->size() != expected) {
      throw DataError(where() + ": staying_times must have one entry per visit but the last");
    }
    for (double s : *staying_times) {
      if (!(s >= 0.0)) throw DataError(where() + ": negative staying time");
    }
  }
}

TransitionCounts& TransitionCounts::operator+=(const TransitionCounts& other) {
  if (size_ == 0) {
    *this = other;
    return *this;
  }
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  for (std::size_t i = 0; i < size_; ++i) row_sums_[i] += other.row_sums_[i];
  total_ += other.total_;
  return *this;
}

TransitionCounts& TransitionCounts::operator-=(const TransitionCounts& other) {
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] -= other.counts_[k];
  for (std::size_t i = 0; i < size_; ++i) row_sums_[i] -= other.row_sums_[i];
  total_ -= other.total_;
  return *this;
}

TransitionCounts count_transitions(std::span<const Location> locations,
                                   std::size_t alphabet_size) {
  TransitionCounts counts(alphabet_size);
  for (std::size_t t = 1; t < locations.size(); ++t) {
    counts.add(locations[t - 1], locations[t]);
  }
  return counts;
}

TransitionCounts count_transitions(const Trajectory& trajectory,
                                   std::size_t alphabet_size,
                                   std::optional<std::size_t> upto) {
  std::size_t n = trajectory.size();
  if (upto) {
    if (*upto > n) {
      throw DataError("count_transitions: prefix length " + std::to_string(*upto) +
                      " exceeds trajectory length " + std::to_string(n));
    }
    n = *upto;
  }
  return count_transitions(std::span(trajectory.locations).first(n), alphabet_size);
}

std::size_t TraceSet::user_index(std::string_view user_id) const {
  for (std::size_t u = 0; u < trajectories.size(); ++u) {
    if (trajectories[u].user_id == user_id) return u;
  }
  throw DataError("unknown user '" + std::string(user_id) + "'");
}

std::vector<TransitionCounts> TraceSet::counts() const {
  std::vector<TransitionCounts> out;
  out.reserve(trajectories.size());
  for (const auto& trajectory : trajectories) {
    out.push_back(count_transitions(trajectory, alphabet.size()));
  }
  return out;
}

void TraceSet::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& trajectory : trajectories) {
    if (!seen.insert(trajectory.user_id).second) {
      throw DataError("duplicate user id '" + trajectory.user_id + "'");
    }
    trajectory.validate(alphabet.size());
  }
}

}  // namespace camp
