#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "camp/trace.hpp"

namespace camp::test {

// "ABAB" -> {0, 1, 0, 1}
inline std::vector<Location> path(std::string_view letters) {
  std::vector<Location> out;
  for (char c : letters) out.push_back(static_cast<Location>(c - 'A'));
  return out;
}

inline Trajectory trajectory(std::string id, std::string_view letters) {
  Trajectory t;
  t.user_id = std::move(id);
  t.locations = path(letters);
  return t;
}

// Arrival times 100, 200, ... unless given.
inline Trajectory timed(std::string id, std::string_view letters, std::vector<std::int64_t> times = {}) {
  Trajectory t = trajectory(std::move(id), letters);
  if (times.empty()) {
    for (std::size_t k = 0; k < t.size(); ++k) times.push_back(100 * static_cast<std::int64_t>(k + 1));
  }
  t.arrival_times = std::move(times);
  return t;
}

inline TraceSet traces(std::size_t locations, std::vector<Trajectory> trajectories) {
  TraceSet out;
  out.alphabet = LocationAlphabet::indexed(locations);
  out.trajectories = std::move(trajectories);
  return out;
}

inline TransitionCounts counts(std::size_t locations, std::string_view letters) {
  return count_transitions(path(letters), locations);
}

}  // namespace camp::test
