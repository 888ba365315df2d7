#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <vector>

#include "camp/errors.hpp"
#include "camp/evaluation.hpp"
#include "camp/format.hpp"
#include "camp/metrics.hpp"
#include "camp/synth.hpp"
#include "camp/trace_io.hpp"

namespace camp::cli {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void write_json(const std::string& path, const Json& json) {
  auto out = open_output(path);
  out << json.dump(2) << '\n';
}

std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

TraceSet load_traces(const std::string& path, std::size_t top_k) {
  if (path.empty()) throw ConfigError("--input is required");
  return ingest_csv(path, top_k > 0 ? AlphabetPolicy::top(top_k) : AlphabetPolicy::all());
}

CampConfig camp_config(const CampArgs& args, unsigned threads) {
  CampConfig config;
  config.iterations = args.k;
  config.samples = args.b;
  config.sweeps = args.m;
  config.seed = args.seed;
  config.prune = {args.prune_max, args.prune_min};
  config.threads = threads;
  config.validate();
  return config;
}

std::vector<PredictorKind> parse_predictors(const std::string& list) {
  std::vector<PredictorKind> out;
  for (auto name : split(list, ',')) {
    name = trim(name);
    if (name.empty()) continue;
    const auto kind = parse_predictor(name);
    if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
  }
  if (out.empty()) throw ConfigError("--predictors lists no predictor");
  return out;
}

Json optional_json(const std::optional<double>& value) {
  return value ? Json(*value) : Json(nullptr);
}

}  // namespace

int run_synth(const SynthArgs& args, const Json& config) {
  if (!args.seed) throw ConfigError("synth needs --seed; synthetic runs must be reproducible");
  SyntheticPrior prior;
  if (args.mode == "perfect") {
    prior.mode = SynthMode::kPerfectClusters;
  } else if (args.mode == "dp") {
    prior.mode = SynthMode::kDpDraw;
  } else if (args.mode == "noise") {
    prior.mode = SynthMode::kDirichletNoise;
  } else {
    throw ConfigError("--mode must be perfect, dp or noise, got '" + args.mode + "'");
  }
  prior.locations = args.locations;
  prior.clusters = args.clusters;
  prior.alpha = args.alpha;
  prior.truncation = args.truncation;
  prior.spread = args.spread;
  prior.length.min = args.len_min > 0 ? args.len_min : args.len;
  prior.length.max = args.len_max > 0 ? args.len_max : args.len;
  if (args.stay_mean > 0.0) prior.stay_mean = args.stay_mean;

  const auto data = generate(prior, args.users, *args.seed);
  {
    auto out = open_output(args.out);
    write_trace_csv(out, data.traces);
  }
  const std::string truth_path = args.truth.empty() ? sibling(args.out, ".truth.json") : args.truth;
  Json truth = truth_to_json(data);
  truth["config"] = config;
  write_json(truth_path, truth);
  std::cout << "wrote " << data.traces.num_users() << " users to " << args.out << " and ground truth to "
            << truth_path << '\n';
  return kOk;
}

int run_ingest(const IngestArgs& args, const Json& config) {
  const auto policy = args.top_k > 0 ? AlphabetPolicy::top(args.top_k) : AlphabetPolicy::all();
  TraceSet traces;
  if (!args.ap_scans.empty()) {
    std::ifstream in(args.ap_scans);
    if (!in) throw DataError("cannot read " + args.ap_scans);
    traces = build_trace_set(ap_scans_to_visits(read_ap_scans(in), args.jaccard), policy);
  } else {
    if (args.input.empty()) throw ConfigError("ingest needs --input or --ap-scans");
    traces = ingest_csv(args.input, policy);
  }
  {
    auto out = open_output(args.out);
    write_trace_csv(out, traces);
  }
  std::size_t visits = 0;
  for (const auto& trajectory : traces.trajectories) visits += trajectory.size();
  Json summary{{"config", config},
               {"users", traces.num_users()},
               {"locations", traces.num_locations()},
               {"visits", visits}};
  write_json(sibling(args.out, ".json"), summary);
  std::cout << "ingested " << traces.num_users() << " users, " << traces.num_locations()
            << " locations, " << visits << " visits into " << args.out << '\n';
  return kOk;
}

int run_fit(const FitArgs& args, unsigned threads, const Json& config) {
  const auto traces = load_traces(args.input, args.top_k);
  const auto model = fit(traces, camp_config(args.camp, threads));
  Json out{{"config", config}, {"locations", traces.alphabet.labels()}, {"model", to_json(model)}};
  write_json(args.out, out);
  std::cout << "fitted " << model.num_users() << " users; final alpha " << format_number(model.alpha)
            << ", " << model.base.num_components() << " base components\n";
  return kOk;
}

int run_eval(const EvalArgs& args, unsigned threads, const Json& config) {
  const auto traces = load_traces(args.input, args.top_k);
  EvalConfig eval;
  eval.predictors = parse_predictors(args.predictors);
  eval.schedule = refit_schedule(args.refit);
  eval.camp = camp_config(args.camp, threads);
  eval.staying_times = args.stays;
  if (args.population != "all" && args.population != "mf" && args.population != "both") {
    throw ConfigError("--population must be all, mf or both, got '" + args.population + "'");
  }

  const auto log = run_streaming(traces, eval);

  std::vector<std::pair<std::string, std::vector<bool>>> populations;
  std::size_t clamped = 0;
  std::size_t mf_users = 0;
  if (args.population != "mf") populations.push_back({"all", {}});
  if (args.population != "all") {
    const auto sim = similarity_matrix(traces);
    clamped = sim.clamped;
    auto mask = sim.mobility_friendly(args.sim_threshold);
    mf_users = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
    populations.push_back({"mf", std::move(mask)});
  }

  std::int64_t first = std::numeric_limits<std::int64_t>::max();
  std::int64_t last = std::numeric_limits<std::int64_t>::min();
  for (const auto& event : log.events) {
    first = std::min(first, event.cutoff);
    last = std::max(last, event.cutoff);
  }
  std::vector<std::int64_t> times;
  if (!log.events.empty() && args.time_points > 0) {
    for (std::size_t k = 1; k <= args.time_points; ++k) {
      const double span = static_cast<double>(last + 1 - first);
      times.push_back(first + static_cast<std::int64_t>(span * static_cast<double>(k) /
                                                        static_cast<double>(args.time_points)));
    }
    times.erase(std::unique(times.begin(), times.end()), times.end());
  }
  std::size_t longest = 0;
  for (std::size_t n : log.lengths) longest = std::max(longest, n);

  std::vector<MetricRow> rows;
  Json finals = Json::object();
  for (std::size_t p = 0; p < log.predictors.size(); ++p) {
    const std::string name(to_string(log.predictors[p]));
    Json per_population = Json::object();
    for (const auto& [label, mask] : populations) {
      // vector<bool> is not contiguous storage
      std::unique_ptr<bool[]> flags(new bool[mask.size()]);
      for (std::size_t u = 0; u < mask.size(); ++u) flags[u] = mask[u];
      const Population population(flags.get(), mask.size());
      for (std::int64_t time : times) {
        const auto value = capr_time(log, p, time, population);
        rows.push_back({"capr_time", name, label, static_cast<double>(time), value.value, value.n});
      }
      for (std::size_t t = 2; t <= longest; ++t) {
        const auto value = capr(log, p, t, population);
        rows.push_back({"capr", name, label, static_cast<double>(t), value.value, value.n});
      }
      for (std::size_t t = 2; t <= longest; ++t) {
        std::size_t excluded = 0;
        const auto value = iapr(log, traces, p, t, population, &excluded);
        rows.push_back({"iapr", name, label, static_cast<double>(t), value.value, value.n});
      }
      const auto overall = capr_time(log, p, std::numeric_limits<std::int64_t>::max(), population);
      Json summary{{"accuracy", optional_json(overall.value)}, {"events", overall.n}};
      if (args.stays) {
        std::vector<std::optional<double>> estimates;
        std::vector<double> truths;
        for (const auto& event : log.events) {
          if (!event.stay_truth || !(population.empty() || population[event.user])) continue;
          estimates.push_back(event.stay_estimate[p]);
          truths.push_back(*event.stay_truth);
        }
        const auto table = staying_time_error(estimates, truths);
        for (int q = 1; q <= 10; ++q) {
          rows.push_back({"stay_error", name, label, q / 10.0, table.quantile(q / 10.0), table.errors.size()});
        }
        std::optional<double> failure_rate;
        if (!estimates.empty()) {
          failure_rate = static_cast<double>(table.failures) / static_cast<double>(estimates.size());
        }
        rows.push_back({"stay_failure_rate", name, label, 0.0, failure_rate, estimates.size()});
        summary["stay_error_median"] = optional_json(table.quantile(0.5));
        summary["stay_failures"] = table.failures;
      }
      per_population[label] = std::move(summary);
    }
    finals[name] = std::move(per_population);
  }

  {
    auto out = open_output(args.out);
    write_metric_csv(out, rows);
  }
  if (!args.log.empty()) {
    auto out = open_output(args.log);
    out << "user_id,t,cutoff,previous,actual";
    for (auto kind : log.predictors) out << ',' << to_string(kind);
    out << '\n';
    for (const auto& event : log.events) {
      out << traces.trajectories[event.user].user_id << ',' << event.t << ',' << event.cutoff << ','
          << traces.alphabet.label(event.previous) << ',' << traces.alphabet.label(event.actual);
      for (Location guess : event.predicted) out << ',' << traces.alphabet.label(guess);
      out << '\n';
    }
  }
  Json summary{{"config", config},
               {"users", traces.num_users()},
               {"locations", traces.num_locations()},
               {"events", log.events.size()},
               {"refit_schedule", log.schedule},
               {"camp_fits", log.camp_fits},
               {"stay_budget_failures", log.stay_budget_failures},
               {"similarity_clamped", clamped},
               {"mf_users", mf_users},
               {"results", std::move(finals)}};
  write_json(args.summary.empty() ? sibling(args.out, ".json") : args.summary, summary);
  std::cout << "evaluated " << log.events.size() << " prediction events for " << log.predictors.size()
            << " predictors into " << args.out << '\n';
  return kOk;
}

int run_similarity(const SimilarityArgs& args, const Json& config) {
  const auto traces = load_traces(args.input, args.top_k);
  const auto sim = similarity_matrix(traces);
  const auto mf = sim.mobility_friendly(args.threshold);
  {
    auto out = open_output(args.out);
    out << "u,v,similarity\n";
    for (std::size_t u = 0; u < traces.num_users(); ++u) {
      for (std::size_t v = 0; v < traces.num_users(); ++v) {
        out << traces.trajectories[u].user_id << ',' << traces.trajectories[v].user_id << ',';
        if (sim.values(u, v)) out << format_number(*sim.values(u, v));
        out << '\n';
      }
    }
  }
  Json mf_list = Json::array();
  for (std::size_t u = 0; u < mf.size(); ++u) {
    if (mf[u]) mf_list.push_back(traces.trajectories[u].user_id);
  }
  Json summary{{"config", config},
               {"users", traces.num_users()},
               {"clamped", sim.clamped},
               {"mf_users", std::move(mf_list)}};
  write_json(args.summary.empty() ? sibling(args.out, ".json") : args.summary, summary);
  std::cout << summary["mf_users"].size() << " of " << traces.num_users()
            << " users are mobility-friendly at threshold " << format_number(args.threshold) << '\n';
  return kOk;
}

}  // namespace camp::cli
