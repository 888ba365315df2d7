#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "camp/trace.hpp"

namespace camp {

/// One row of the trace CSV `user_id,location,arrival_ts,stay_s`.
struct VisitRow {
  std::string user_id;
  std::string location;
  std::int64_t arrival_ts = 0;
  std::optional<double> stay_s;
  std::size_t line = 0;
};

/// How the location alphabet is chosen during ingestion.
struct AlphabetPolicy {
  enum class Kind { kAll, kTopK, kFixed };
  Kind kind = Kind::kAll;
  std::size_t top_k = 0;
  std::optional<LocationAlphabet> fixed;

  static AlphabetPolicy all() { return {}; }
  static AlphabetPolicy top(std::size_t k) { return {Kind::kTopK, k, {}}; }
  static AlphabetPolicy given(LocationAlphabet alphabet) {
    return {Kind::kFixed, 0, std::move(alphabet)};
  }
};

/// Parses the trace CSV. Throws DataError naming the offending line.
std::vector<VisitRow> read_visit_rows(std::istream& in);

/// The K most visited locations; ties broken by label. Labels of the
/// resulting alphabet are sorted lexicographically.
LocationAlphabet top_locations(std::span<const VisitRow> rows, std::size_t k);

/// Groups rows per user (first-appearance order), sorts by time, collapses
/// repeated locations (summing stays), drops locations outside the alphabet
/// and collapses again. A missing stay is taken as the gap to the user's next
/// row. Users left with no location are dropped.
TraceSet build_trace_set(std::vector<VisitRow> rows,
                         const AlphabetPolicy& policy);

TraceSet ingest_csv(const std::filesystem::path& path,
                    const AlphabetPolicy& policy);
TraceSet ingest_csv(std::istream& in, const AlphabetPolicy& policy);

/// Writes the trace CSV; the stay of a trajectory's last visit is left empty.
void write_trace_csv(std::ostream& out, const TraceSet& traces);

/// Greedy online Jaccard clustering of AP scans: a scan joins the first
/// location with the best Jaccard index to its representative (the first
/// scan that created it) if that index is >= threshold, otherwise it opens a
/// new location. Order-dependent.
std::vector<Location> jaccard_location_map(
    std::span<const std::set<std::string>> scans, double threshold);

/// Row of the AP-scan file `user_id,arrival_ts,ap_list`.
struct ApScanRow {
  std::string user_id;
  std::int64_t arrival_ts = 0;
  std::set<std::string> access_points;
  std::size_t line = 0;
};

std::vector<ApScanRow> read_ap_scans(std::istream& in);

/// Maps scans (stable-sorted by time) to visit rows with labels "A0000",
/// "A0001", ...
std::vector<VisitRow> ap_scans_to_visits(std::vector<ApScanRow> scans,
                                         double threshold);

}  // namespace camp
