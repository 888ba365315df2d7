#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "camp/serialization.hpp"

namespace camp::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kCheckFailed = 3 };

struct SynthArgs {
  std::string mode = "perfect";
  std::size_t clusters = 3;
  std::size_t users = 60;
  std::size_t locations = 10;
  std::size_t len = 20;
  std::size_t len_min = 0;  // 0: use len
  std::size_t len_max = 0;
  double alpha = 1.0;
  std::size_t truncation = 100;
  double spread = 0.1;
  double stay_mean = 0.0;  // 0: no stays
  std::optional<std::uint64_t> seed;
  std::string out = "traces.csv";
  std::string truth;
};

struct IngestArgs {
  std::string input;
  std::string ap_scans;
  double jaccard = 0.5;
  std::size_t top_k = 0;
  std::string out = "traces.csv";
};

struct CampArgs {
  int k = 3;
  int b = 8;
  int m = 30;
  std::uint64_t seed = 0;
  std::size_t prune_max = 512;
  double prune_min = 1e-10;
};

struct FitArgs {
  std::string input;
  std::size_t top_k = 0;
  CampArgs camp;
  std::string out = "model.json";
};

struct EvalArgs {
  std::string input;
  std::size_t top_k = 0;
  std::string predictors = "markov,agg,camp";
  std::string refit = "25";
  CampArgs camp;
  std::string population = "all";
  double sim_threshold = 0.5;
  std::size_t time_points = 20;
  bool stays = false;
  std::string out = "metrics.csv";
  std::string summary;
  std::string log;
};

struct OracleCheckArgs {
  std::string suite = "all";
  std::size_t instances = 20;
  std::size_t users = 4;
  std::size_t locations = 3;
  std::size_t max_len = 5;
  std::size_t chains = 10000;
  int sweeps = 50;
  std::size_t batches = 1000;
  double co_tol = 0.03;
  double theta_tol = 0.03;
  double lemma_tol = 1e-8;
  std::uint64_t seed = 1;
  std::string out;
};

struct SimilarityArgs {
  std::string input;
  std::size_t top_k = 0;
  double threshold = 0.5;
  std::string out = "similarity.csv";
  std::string summary;
};

int run_synth(const SynthArgs& args, const Json& config);
int run_ingest(const IngestArgs& args, const Json& config);
int run_fit(const FitArgs& args, unsigned threads, const Json& config);
int run_eval(const EvalArgs& args, unsigned threads, const Json& config);
int run_oracle_check(const OracleCheckArgs& args, unsigned threads, const Json& config);
int run_similarity(const SimilarityArgs& args, const Json& config);

}  // namespace camp::cli
