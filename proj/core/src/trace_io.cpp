#include "camp/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "camp/errors.hpp"
#include "camp/format.hpp"

namespace camp {

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(text.substr(start));
      return fields;
    }
    fields.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

namespace {

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

std::int64_t parse_int(std::string_view text, std::size_t line,
                       const char* field) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    fail_line(line, std::string("malformed ") + field + " '" + std::string(text) + "'");
  }
  return value;
}

double parse_double(std::string_view text, std::size_t line, const char* field) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    fail_line(line, std::string("malformed ") + field + " '" + std::string(text) + "'");
  }
  return value;
}

// Yields (line number, trimmed content) for non-empty lines after the header.
template <class Fn>
void for_each_data_line(std::istream& in, std::string_view expected_header,
                        std::string_view alt_header, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    const auto content = trim(line);
    if (content.empty()) continue;
    if (!header_seen) {
      if (content != expected_header && content != alt_header) {
        fail_line(number, "expected header '" + std::string(expected_header) + "'");
      }
      header_seen = true;
      continue;
    }
    fn(number, content);
  }
  if (!header_seen) throw DataError("empty input: missing header");
}

struct Visit {
  std::string label;
  std::int64_t arrival;
  std::optional<double> stay;
};

// Merges consecutive visits to the same label, summing stays.
std::vector<Visit> collapse(std::vector<Visit> visits) {
  std::vector<Visit> out;
  for (auto& v : visits) {
    if (!out.empty() && out.back().label == v.label) {
      auto& last = out.back();
      if (last.stay && v.stay) {
        *last.stay += *v.stay;
      } else {
        last.stay = std::nullopt;
      }
      continue;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::vector<VisitRow> read_visit_rows(std::istream& in) {
  std::vector<VisitRow> rows;
  for_each_data_line(
      in, "user_id,location,arrival_ts,stay_s", "user_id,location,arrival_ts",
      [&](std::size_t line, std::string_view content) {
        const auto fields = split(content, ',');
        if (fields.size() != 3 && fields.size() != 4) {
          fail_line(line, "expected 3 or 4 fields, got " + std::to_string(fields.size()));
        }
        VisitRow row;
        row.line = line;
        row.user_id = std::string(trim(fields[0]));
        row.location = std::string(trim(fields[1]));
        if (row.user_id.empty()) fail_line(line, "empty user_id");
        if (row.location.empty()) fail_line(line, "empty location");
        row.arrival_ts = parse_int(trim(fields[2]), line, "arrival_ts");
        if (fields.size() == 4 && !trim(fields[3]).empty()) {
          const double stay = parse_double(trim(fields[3]), line, "stay_s");
          if (!(stay >= 0.0)) fail_line(line, "negative stay_s");
          row.stay_s = stay;
        }
        rows.push_back(std::move(row));
      });
  return rows;
}

LocationAlphabet top_locations(std::span<const VisitRow> rows, std::size_t k) {
  std::map<std::string, std::size_t> visits;
  for (const auto& row : rows) ++visits[row.location];
  if (k == 0 || k > visits.size()) {
    throw DataError("top_locations: K=" + std::to_string(k) + " but only " +
                    std::to_string(visits.size()) + " distinct locations");
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(visits.begin(), visits.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) labels.push_back(ranked[i].first);
  std::sort(labels.begin(), labels.end());
  return LocationAlphabet(std::move(labels));
}

TraceSet build_trace_set(std::vector<VisitRow> rows,
                         const AlphabetPolicy& policy) {
  TraceSet traces;
  switch (policy.kind) {
    case AlphabetPolicy::Kind::kAll: {
      std::vector<std::string> labels;
      for (const auto& row : rows) labels.push_back(row.location);
      std::sort(labels.begin(), labels.end());
      labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
      traces.alphabet = LocationAlphabet(std::move(labels));
      break;
    }
    case AlphabetPolicy::Kind::kTopK:
      traces.alphabet = top_locations(rows, policy.top_k);
      break;
    case AlphabetPolicy::Kind::kFixed:
      if (!policy.fixed) throw ConfigError("fixed alphabet policy without alphabet");
      traces.alphabet = *policy.fixed;
      break;
  }

  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<VisitRow>> by_user;
  for (auto& row : rows) {
    auto [it, inserted] = by_user.try_emplace(row.user_id);
    if (inserted) order.push_back(row.user_id);
    it->second.push_back(std::move(row));
  }

  for (const auto& user : order) {
    auto& user_rows = by_user[user];
    std::stable_sort(user_rows.begin(), user_rows.end(),
                     [](const VisitRow& a, const VisitRow& b) {
                       return a.arrival_ts < b.arrival_ts;
                     });
    std::vector<Visit> visits;
    for (std::size_t r = 0; r < user_rows.size(); ++r) {
      const auto& row = user_rows[r];
      if (r > 0 && row.arrival_ts == user_rows[r - 1].arrival_ts) {
        throw DataError("user '" + user + "': two rows with arrival_ts " +
                        std::to_string(row.arrival_ts) + " (lines " +
                        std::to_string(user_rows[r - 1].line) + ", " +
                        std::to_string(row.line) + ")");
      }
      std::optional<double> stay = row.stay_s;
      if (!stay && r + 1 < user_rows.size()) {
        stay = static_cast<double>(user_rows[r + 1].arrival_ts - row.arrival_ts);
      }
      visits.push_back({row.location, row.arrival_ts, stay});
    }
    visits = collapse(std::move(visits));
    std::erase_if(visits, [&](const Visit& v) { return !traces.alphabet.find(v.label); });
    visits = collapse(std::move(visits));
    if (visits.empty()) continue;

    Trajectory trajectory;
    trajectory.user_id = user;
    std::vector<std::int64_t> arrivals;
    std::vector<double> stays;
    bool stays_complete = true;
    for (std::size_t t = 0; t < visits.size(); ++t) {
      trajectory.locations.push_back(*traces.alphabet.find(visits[t].label));
      arrivals.push_back(visits[t].arrival);
      if (t + 1 < visits.size()) {
        if (visits[t].stay) {
          stays.push_back(*visits[t].stay);
        } else {
          stays_complete = false;
        }
      }
    }
    trajectory.arrival_times = std::move(arrivals);
    if (stays_complete) trajectory.staying_times = std::move(stays);
    traces.trajectories.push_back(std::move(trajectory));
  }
  traces.validate();
  return traces;
}

TraceSet ingest_csv(std::istream& in, const AlphabetPolicy& policy) {
  return build_trace_set(read_visit_rows(in), policy);
}

TraceSet ingest_csv(const std::filesystem::path& path,
                    const AlphabetPolicy& policy) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ingest_csv(in, policy);
}

void write_trace_csv(std::ostream& out, const TraceSet& traces) {
  out << "user_id,location,arrival_ts,stay_s\n";
  for (const auto& trajectory : traces.trajectories) {
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
      out << trajectory.user_id << ','
          << traces.alphabet.label(trajectory.locations[t]) << ','
          << (trajectory.arrival_times ? (*trajectory.arrival_times)[t]
                                       : static_cast<std::int64_t>(t))
          << ',';
      if (trajectory.staying_times && t + 1 < trajectory.size()) {
        out << format_number((*trajectory.staying_times)[t]);
      }
      out << '\n';
    }
  }
}

std::vector<Location> jaccard_location_map(
    std::span<const std::set<std::string>> scans, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("jaccard threshold must be in (0, 1]");
  }
  std::vector<const std::set<std::string>*> representatives;
  std::vector<Location> out;
  out.reserve(scans.size());
  for (std::size_t s = 0; s < scans.size(); ++s) {
    const auto& scan = scans[s];
    if (scan.empty()) throw DataError("scan " + std::to_string(s + 1) + " is empty");
    double best = -1.0;
    std::size_t best_index = 0;
    for (std::size_t r = 0; r < representatives.size(); ++r) {
      const auto& rep = *representatives[r];
      std::size_t shared = 0;
      for (const auto& ap : scan) shared += rep.count(ap);
      const double jaccard = static_cast<double>(shared) /
                             static_cast<double>(scan.size() + rep.size() - shared);
      if (jaccard > best) {
        best = jaccard;
        best_index = r;
      }
    }
    if (best >= threshold) {
      out.push_back(static_cast<Location>(best_index));
    } else {
      out.push_back(static_cast<Location>(representatives.size()));
      representatives.push_back(&scan);
    }
  }
  return out;
}

std::vector<ApScanRow> read_ap_scans(std::istream& in) {
  std::vector<ApScanRow> rows;
  for_each_data_line(
      in, "user_id,arrival_ts,ap_list", "user_id,arrival_ts,ap_list",
      [&](std::size_t line, std::string_view content) {
        const auto fields = split(content, ',');
        if (fields.size() != 3) {
          fail_line(line, "expected 3 fields, got " + std::to_string(fields.size()));
        }
        ApScanRow row;
        row.line = line;
        row.user_id = std::string(trim(fields[0]));
        if (row.user_id.empty()) fail_line(line, "empty user_id");
        row.arrival_ts = parse_int(trim(fields[1]), line, "arrival_ts");
        for (auto ap : split(fields[2], ';')) {
          ap = trim(ap);
          if (!ap.empty()) row.access_points.emplace(ap);
        }
        if (row.access_points.empty()) fail_line(line, "empty ap_list");
        rows.push_back(std::move(row));
      });
  return rows;
}

std::vector<VisitRow> ap_scans_to_visits(std::vector<ApScanRow> scans,
                                         double threshold) {
  std::stable_sort(scans.begin(), scans.end(),
                   [](const ApScanRow& a, const ApScanRow& b) {
                     return a.arrival_ts < b.arrival_ts;
                   });
  std::vector<std::set<std::string>> sets;
  sets.reserve(scans.size());
  for (const auto& scan : scans) sets.push_back(scan.access_points);
  const auto locations = jaccard_location_map(sets, threshold);
  std::vector<VisitRow> rows;
  rows.reserve(scans.size());
  for (std::size_t s = 0; s < scans.size(); ++s) {
    char label[32];
    std::snprintf(label, sizeof label, "A%04d", locations[s]);
    rows.push_back({scans[s].user_id, label, scans[s].arrival_ts, std::nullopt,
                    scans[s].line});
  }
  return rows;
}

}  // namespace camp
