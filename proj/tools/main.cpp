#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI/CLI11.hpp>

#include "camp/errors.hpp"
#include "commands.hpp"
#include "run_config.hpp"

using namespace camp::cli;

namespace {

struct Common {
  std::string config;
  unsigned threads = 1;
};

void add_common(CLI::App* command, Common& common) {
  command->add_option("--config", common.config, "Flat 'key = value' file; flags override it");
  command->add_option("--threads", common.threads, "Worker thread cap")->check(CLI::PositiveNumber);
}

void add_camp(CLI::App* command, CampArgs& camp) {
  command->add_option("--camp-k", camp.k, "Sampling rounds K");
  command->add_option("--camp-b", camp.b, "Partitions per round B");
  command->add_option("--camp-m", camp.m, "Gibbs sweeps per chain M");
  command->add_option("--seed", camp.seed, "Random seed");
  command->add_option("--prune-max", camp.prune_max, "Base-measure component cap");
  command->add_option("--prune-min", camp.prune_min, "Base-measure weight floor");
}

// Splices config-file arguments right after the subcommand name so that
// explicit flags, parsed later, take precedence.
std::vector<std::string> expand(int argc, char** argv, const CLI::App& app) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::size_t command = args.size();
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k].rfind("-", 0) != 0) {
      command = k;
      break;
    }
  }
  if (command == args.size()) return args;
  std::string path;
  for (std::size_t k = command + 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;
  const CLI::App* chosen = nullptr;
  for (const auto* sub : app.get_subcommands({})) {
    if (sub->get_name() == args[command]) chosen = sub;
  }
  if (chosen == nullptr) return args;
  std::vector<std::string> extra;
  for (auto& arg : config_file_args(path)) {
    const auto name = arg.substr(0, arg.find('='));
    if (chosen->get_option_no_throw(name) == nullptr) {
      // Keys meant for another command are skipped; unknown keys are errors.
      bool known = false;
      for (const auto* sub : app.get_subcommands({})) {
        known = known || sub->get_option_no_throw(name) != nullptr;
      }
      if (known) continue;
    }
    extra.push_back(std::move(arg));
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(command) + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"camp: cluster-aided mobility prediction"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate clustered synthetic traces");
  synth_cmd->add_option("--mode", synth.mode, "perfect | dp | noise");
  synth_cmd->add_option("--clusters", synth.clusters, "Cluster count");
  synth_cmd->add_option("--users", synth.users, "User count");
  synth_cmd->add_option("--locations", synth.locations, "Location count");
  synth_cmd->add_option("--len", synth.len, "Visits per user");
  synth_cmd->add_option("--len-min", synth.len_min, "Shortest trajectory (default --len)");
  synth_cmd->add_option("--len-max", synth.len_max, "Longest trajectory (default --len)");
  synth_cmd->add_option("--alpha", synth.alpha, "DP concentration (dp mode)");
  synth_cmd->add_option("--truncation", synth.truncation, "Stick-breaking truncation (dp mode)");
  synth_cmd->add_option("--spread", synth.spread, "Kernel noise around centers (noise mode)");
  synth_cmd->add_option("--stay-mean", synth.stay_mean, "Mean staying time in seconds; 0 for none");
  synth_cmd->add_option("--seed", synth.seed, "Random seed (required)");
  synth_cmd->add_option("--out", synth.out, "Trace CSV");
  synth_cmd->add_option("--truth", synth.truth, "Ground-truth JSON (default next to --out)");
  add_common(synth_cmd, common);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Clean a raw trace CSV or map AP scans to locations");
  ingest_cmd->add_option("--input", ingest.input, "Raw trace CSV");
  ingest_cmd->add_option("--ap-scans", ingest.ap_scans, "AP-scan file (user_id,arrival_ts,ap_list)");
  ingest_cmd->add_option("--jaccard", ingest.jaccard, "Jaccard threshold for AP-scan mapping");
  ingest_cmd->add_option("--top-k", ingest.top_k, "Keep the K most visited locations; 0 keeps all");
  ingest_cmd->add_option("--out", ingest.out, "Cleaned trace CSV");
  add_common(ingest_cmd, common);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit CAMP and write the model");
  fit_cmd->add_option("--input", fit_args.input, "Trace CSV");
  fit_cmd->add_option("--top-k", fit_args.top_k, "Keep the K most visited locations; 0 keeps all");
  add_camp(fit_cmd, fit_args.camp);
  fit_cmd->add_option("--out", fit_args.out, "Model JSON");
  add_common(fit_cmd, common);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Streaming prediction and metrics");
  eval_cmd->add_option("--input", eval.input, "Trace CSV with arrival times");
  eval_cmd->add_option("--top-k", eval.top_k, "Keep the K most visited locations; 0 keeps all");
  eval_cmd->add_option("--predictors,--predictor", eval.predictors,
                       "Comma list of markov, markov2, agg, aggc, camp, campc");
  eval_cmd->add_option("--refit-epoch", eval.refit, "event | static | refit every E events");
  add_camp(eval_cmd, eval.camp);
  eval_cmd->add_option("--population", eval.population, "all | mf | both");
  eval_cmd->add_option("--sim-threshold", eval.sim_threshold, "Similarity threshold for MF users");
  eval_cmd->add_option("--time-points", eval.time_points, "Points on the CAPR_time axis");
  eval_cmd->add_flag("--stays", eval.stays, "Also estimate staying times");
  eval_cmd->add_option("--out", eval.out, "Metric CSV");
  eval_cmd->add_option("--summary", eval.summary, "Summary JSON (default next to --out)");
  eval_cmd->add_option("--log", eval.log, "Per-event prediction CSV");
  add_common(eval_cmd, common);

  OracleCheckArgs check;
  auto* check_cmd = app.add_subcommand("oracle-check", "Compare the sampler with exact enumeration");
  check_cmd->add_option("--suite", check.suite, "gibbs | lemma1 | all");
  check_cmd->add_option("--instances", check.instances, "Random instances per suite");
  check_cmd->add_option("--users", check.users, "Users per instance");
  check_cmd->add_option("--locations", check.locations, "Locations per instance");
  check_cmd->add_option("--max-len", check.max_len, "Longest trajectory");
  check_cmd->add_option("--chains", check.chains, "Independent Gibbs chains per instance");
  check_cmd->add_option("--sweeps", check.sweeps, "Sweeps per chain");
  check_cmd->add_option("--batches", check.batches, "Sampled partitions for the theta comparison");
  check_cmd->add_option("--co-tol", check.co_tol, "Co-clustering tolerance");
  check_cmd->add_option("--theta-tol", check.theta_tol, "Kernel estimate tolerance");
  check_cmd->add_option("--lemma-tol", check.lemma_tol, "Weight-expansion tolerance");
  check_cmd->add_option("--seed", check.seed, "Random seed");
  check_cmd->add_option("--out", check.out, "Report JSON");
  add_common(check_cmd, common);

  SimilarityArgs sim;
  auto* sim_cmd = app.add_subcommand("similarity", "Pairwise user similarity and MF users");
  sim_cmd->add_option("--input", sim.input, "Trace CSV");
  sim_cmd->add_option("--top-k", sim.top_k, "Keep the K most visited locations; 0 keeps all");
  sim_cmd->add_option("--threshold", sim.threshold, "MF similarity threshold");
  sim_cmd->add_option("--out", sim.out, "Similarity CSV");
  sim_cmd->add_option("--summary", sim.summary, "Summary JSON (default next to --out)");
  add_common(sim_cmd, common);

  try {
    auto args = expand(argc, argv, app);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const camp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*synth_cmd) return run_synth(synth, resolved_config(*synth_cmd));
    if (*ingest_cmd) return run_ingest(ingest, resolved_config(*ingest_cmd));
    if (*fit_cmd) return run_fit(fit_args, common.threads, resolved_config(*fit_cmd));
    if (*eval_cmd) return run_eval(eval, common.threads, resolved_config(*eval_cmd));
    if (*check_cmd) return run_oracle_check(check, common.threads, resolved_config(*check_cmd));
    if (*sim_cmd) return run_similarity(sim, resolved_config(*sim_cmd));
  } catch (const camp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const camp::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const camp::BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}
