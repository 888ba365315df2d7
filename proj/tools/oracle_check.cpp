#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "camp/errors.hpp"
#include "camp/gibbs.hpp"
#include "camp/lemma.hpp"
#include "camp/oracle.hpp"
#include "camp/synth.hpp"
#include "commands.hpp"

namespace camp::cli {

namespace {

// Small random instance: two random kernels, users split between them.
std::vector<TransitionCounts> instance(const OracleCheckArgs& args, std::size_t index) {
  SyntheticPrior prior;
  prior.locations = args.locations;
  prior.clusters = 2;
  prior.length = {1, args.max_len};
  return generate(prior, args.users, mix_seed(args.seed) + index).traces.counts();
}

double max_gap(const Matrix<double>& a, const Matrix<double>& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) gap = std::max(gap, std::abs(a(i, j) - b(i, j)));
  }
  return gap;
}

std::string show(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3g", value);
  return buffer;
}

std::vector<std::string> user_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t u = 0; u < n; ++u) out.push_back("u" + std::to_string(u));
  return out;
}

}  // namespace

int run_oracle_check(const OracleCheckArgs& args, unsigned threads, const Json& config) {
  const bool gibbs = args.suite == "gibbs" || args.suite == "all";
  const bool lemma = args.suite == "lemma1" || args.suite == "all";
  if (!gibbs && !lemma) throw ConfigError("--suite must be gibbs, lemma1 or all, got '" + args.suite + "'");
  if (args.users < 1 || args.users > kMaxOracleUsers) {
    throw ConfigError("--users must be between 1 and " + std::to_string(kMaxOracleUsers));
  }
  if (args.instances < 1 || args.chains < 1 || args.batches < 1 || args.max_len < 1) {
    throw ConfigError("--instances, --chains, --batches and --max-len must be positive");
  }

  Json report{{"config", config}};
  bool passed = true;

  if (gibbs) {
    Json rows = Json::array();
    double worst_co = 0.0;
    double worst_theta = 0.0;
    for (std::size_t k = 0; k < args.instances; ++k) {
      const auto counts = instance(args, k);
      const auto exact = enumerate_posterior(counts, 1.0);

      GibbsConfig cfg{1.0, MixtureBase::uniform(args.locations), args.sweeps,
                      mix_seed(args.seed + 1) + k * args.chains};
      const auto samples = draw_batch(counts, cfg, args.chains, threads);
      const double co = max_gap(co_cluster_matrix(samples), exact.co_cluster);

      CampConfig camp;
      camp.iterations = 1;
      camp.samples = static_cast<int>(args.batches);
      camp.sweeps = args.sweeps;
      camp.seed = mix_seed(args.seed + 2) + k * args.batches;
      camp.threads = threads;
      const auto model = fit(counts, user_names(counts.size()), camp);
      double theta = 0.0;
      for (std::size_t u = 0; u < counts.size(); ++u) {
        theta = std::max(theta, max_gap(model.theta[u].matrix(), exact.expected_theta[u].matrix()));
      }
      const bool ok = co <= args.co_tol && theta <= args.theta_tol;
      passed = passed && ok;
      worst_co = std::max(worst_co, co);
      worst_theta = std::max(worst_theta, theta);
      std::cout << "gibbs instance " << k << ": co-cluster gap " << show(co) << ", theta gap "
                << show(theta) << (ok ? " ok" : " FAILED") << '\n';
      rows.push_back({{"instance", k}, {"co_cluster_gap", co}, {"theta_gap", theta}, {"pass", ok}});
    }
    std::cout << "gibbs suite: worst co-cluster gap " << show(worst_co) << " (tolerance "
              << show(args.co_tol) << "), worst theta gap " << show(worst_theta) << " (tolerance "
              << show(args.theta_tol) << ")\n";
    report["gibbs"] = std::move(rows);
  }

  if (lemma) {
    Json rows = Json::array();
    double worst = 0.0;
    for (std::size_t k = 0; k < args.instances; ++k) {
      const auto counts = instance(args, k);
      for (int rounds : {1, 2}) {
        for (int batch : {1, 2}) {
          CampConfig camp;
          camp.iterations = rounds;
          camp.samples = batch;
          camp.sweeps = 10;
          camp.seed = mix_seed(args.seed + 3) + k;
          camp.prune = {std::numeric_limits<std::size_t>::max(), 0.0};
          camp.threads = threads;
          const auto model = fit(counts, user_names(counts.size()), camp);
          const ChainExpansion chains(model);
          double gap = 0.0;
          for (std::size_t u = 0; u < counts.size(); ++u) {
            const auto rebuilt = chains.weights(u).reconstruct(counts);
            gap = std::max(gap, max_gap(model.theta[u].matrix(), rebuilt.matrix()));
          }
          const bool ok = gap <= args.lemma_tol;
          passed = passed && ok;
          worst = std::max(worst, gap);
          rows.push_back({{"instance", k}, {"K", rounds}, {"B", batch}, {"gap", gap}, {"pass", ok}});
          if (!ok) {
            std::cout << "lemma1 instance " << k << " K=" << rounds << " B=" << batch << ": gap "
                      << show(gap) << " FAILED\n";
          }
        }
      }
    }
    std::cout << "lemma1 suite: worst gap " << show(worst) << " over " << args.instances * 4
              << " fits (tolerance " << show(args.lemma_tol) << ")\n";
    report["lemma1"] = std::move(rows);
  }

  report["pass"] = passed;
  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw DataError("cannot write " + args.out);
    out << report.dump(2) << '\n';
  }
  std::cout << (passed ? "oracle check passed\n" : "oracle check FAILED\n");
  return passed ? kOk : kCheckFailed;
}

}  // namespace camp::cli
