#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "camp/errors.hpp"
#include "camp/oracle.hpp"
#include "camp/synth.hpp"
#include "support.hpp"

namespace camp {
namespace {

using test::counts;

Kernel cycle3() {
  Kernel k(3, 3, 0.0);
  k(0, 1) = k(1, 2) = k(2, 0) = 1.0;
  return k;
}

TEST(Walk, CycleKernelIsTheCycle) {
  Rng rng(1);
  EXPECT_EQ(walk(cycle3(), 1, 7, rng), test::path("BCABCAB"));
}

TEST(Walk, NeverStaysPut) {
  Rng rng(2);
  const auto k = uniform_kernel(4, rng);
  const auto steps = walk(k, 0, 500, rng);
  for (std::size_t t = 1; t < steps.size(); ++t) EXPECT_NE(steps[t], steps[t - 1]);
}

TEST(OffDiagonal, RenormalizesAndRejectsSelfLoops) {
  Kernel k(2, 2, 0.5);
  const auto o = off_diagonal(k);
  EXPECT_EQ(o(0, 1), 1.0);
  EXPECT_EQ(o(1, 0), 1.0);
  EXPECT_EQ(o(0, 0), 0.0);
  k(0, 0) = 1.0;
  k(0, 1) = 0.0;
  EXPECT_THROW(off_diagonal(k), DataError);
  SyntheticPrior prior;
  prior.locations = 2;
  prior.clusters = 1;
  prior.centers = {k};
  EXPECT_THROW(generate(prior, 3, 0), DataError);
}

TEST(StickBreaking, SumsToOne) {
  Rng rng(3);
  const auto w = stick_breaking(2.0, 50, rng);
  ASSERT_EQ(w.size(), 50u);
  double total = 0.0;
  for (double x : w) {
    EXPECT_GE(x, 0.0);
    total += x;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Generate, SameSeedSameData) {
  SyntheticPrior prior;
  prior.stay_mean = 1800.0;
  prior.length = {5, 25};
  const auto a = generate(prior, 20, 7);
  const auto b = generate(prior, 20, 7);
  EXPECT_EQ(a.traces, b.traces);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(generate(prior, 20, 8).traces, a.traces);
  for (const auto& t : a.traces.trajectories) {
    EXPECT_GE(t.size(), 5u);
    EXPECT_LE(t.size(), 25u);
    ASSERT_TRUE(t.arrival_times && t.staying_times);
    EXPECT_NO_THROW(t.validate(prior.locations));
  }
  EXPECT_NO_THROW(a.traces.validate());
}

TEST(Generate, OneClusterSharesOneKernel) {
  SyntheticPrior prior;
  prior.clusters = 1;
  const auto data = generate(prior, 12, 4);
  ASSERT_EQ(data.atoms.size(), 1u);
  for (std::size_t u = 0; u < 12; ++u) {
    EXPECT_EQ(data.labels[u], 0);
    EXPECT_EQ(data.drawn[u], data.atoms[0]);
  }
}

TEST(Generate, GivenCentersAreUsed) {
  SyntheticPrior prior;
  prior.locations = 3;
  prior.clusters = 1;
  prior.centers = {cycle3()};
  prior.length = {6, 6};
  const auto data = generate(prior, 3, 0);
  for (const auto& t : data.traces.trajectories) {
    for (std::size_t k = 1; k < t.size(); ++k) EXPECT_EQ(t.locations[k], (t.locations[k - 1] + 1) % 3);
  }
}

TEST(Generate, DpAndNoiseModes) {
  SyntheticPrior prior;
  prior.mode = SynthMode::kDpDraw;
  prior.truncation = 30;
  const auto dp = generate(prior, 40, 5);
  EXPECT_EQ(dp.atoms.size(), 30u);
  for (int label : dp.labels) {
    EXPECT_GE(label, 0);
    EXPECT_LT(label, 30);
  }

  prior.mode = SynthMode::kDirichletNoise;
  prior.clusters = 2;
  prior.spread = 0.05;
  const auto noisy = generate(prior, 10, 5);
  std::set<int> labels(noisy.labels.begin(), noisy.labels.end());
  EXPECT_LE(labels.size(), 2u);
  for (std::size_t u = 0; u < 10; ++u) {
    EXPECT_NE(noisy.drawn[u], noisy.atoms[noisy.labels[u]]);
    for (std::size_t i = 0; i < prior.locations; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < prior.locations; ++j) row += noisy.drawn[u](i, j);
      EXPECT_NEAR(row, 1.0, 1e-9);
    }
  }
}

TEST(Generate, Validation) {
  SyntheticPrior prior;
  prior.locations = 1;
  EXPECT_THROW(generate(prior, 2, 0), ConfigError);
  prior = {};
  prior.clusters = 0;
  EXPECT_THROW(generate(prior, 2, 0), ConfigError);
  prior = {};
  prior.length = {5, 4};
  EXPECT_THROW(generate(prior, 2, 0), ConfigError);
  prior = {};
  prior.centers = {cycle3()};
  EXPECT_THROW(generate(prior, 2, 0), ConfigError);
}

double block_weight(const std::vector<TransitionCounts>& n, std::initializer_list<std::size_t> block) {
  TransitionCounts pooled(n[0].size());
  for (auto u : block) pooled += n[u];
  return std::exp(log_marginal(pooled, PseudoCounts(n[0].size()))) * std::tgamma(static_cast<double>(block.size()));
}

TEST(EnumeratePosterior, SingleUser) {
  const std::vector<TransitionCounts> n{counts(3, "ABCAB")};
  const auto exact = enumerate_posterior(n, 2.0);
  ASSERT_EQ(exact.partitions.size(), 1u);
  EXPECT_DOUBLE_EQ(exact.partitions[0].probability, 1.0);
  const auto laplace = posterior_mean(n[0], MixtureBase::uniform(3));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(exact.expected_theta[0](i, j), laplace(i, j), 1e-15);
  }
}

TEST(EnumeratePosterior, TwoUsers) {
  const std::vector<TransitionCounts> empty(2, TransitionCounts(3));
  const auto e = enumerate_posterior(empty, 1.0);
  EXPECT_NEAR(e.co_cluster(0, 1), 0.5, 1e-15);

  const std::vector<TransitionCounts> same{counts(2, "ABABAB"), counts(2, "ABABAB")};
  const double together = block_weight(same, {0, 1});
  const double apart = block_weight(same, {0}) * block_weight(same, {1});
  const auto s = enumerate_posterior(same, 1.0);
  EXPECT_NEAR(s.co_cluster(0, 1), together / (together + apart), 1e-12);
  EXPECT_GT(s.co_cluster(0, 1), 0.5);
}

TEST(EnumeratePosterior, ThreeUsersByHand) {
  const std::vector<TransitionCounts> n{counts(3, "ABC"), counts(3, "ABCA"), counts(3, "CB")};
  const double alpha = 0.7;
  const double a = alpha;
  // {012}, {01}{2}, {02}{1}, {0}{12}, {0}{1}{2}
  const double w[] = {
      a * block_weight(n, {0, 1, 2}),
      a * a * block_weight(n, {0, 1}) * block_weight(n, {2}),
      a * a * block_weight(n, {0, 2}) * block_weight(n, {1}),
      a * a * block_weight(n, {0}) * block_weight(n, {1, 2}),
      a * a * a * block_weight(n, {0}) * block_weight(n, {1}) * block_weight(n, {2}),
  };
  const double z = w[0] + w[1] + w[2] + w[3] + w[4];
  const auto exact = enumerate_posterior(n, alpha);
  ASSERT_EQ(exact.partitions.size(), 5u);
  double total = 0.0;
  for (const auto& p : exact.partitions) total += p.probability;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(exact.co_cluster(0, 1), (w[0] + w[1]) / z, 1e-12);
  EXPECT_NEAR(exact.co_cluster(0, 2), (w[0] + w[2]) / z, 1e-12);
  EXPECT_NEAR(exact.co_cluster(1, 2), (w[0] + w[3]) / z, 1e-12);
  EXPECT_EQ(exact.co_cluster(2, 2), 1.0);

  // Relabeling users permutes the answer.
  const std::vector<TransitionCounts> swapped{n[2], n[0], n[1]};
  const auto other = enumerate_posterior(swapped, alpha);
  EXPECT_NEAR(other.co_cluster(1, 2), exact.co_cluster(0, 1), 1e-12);
  EXPECT_NEAR(other.co_cluster(0, 1), exact.co_cluster(0, 2), 1e-12);
}

TEST(EnumeratePosterior, BellNumbersAndGuard) {
  std::size_t count = 0;
  for_each_partition(5, [&](const std::vector<std::size_t>&) { ++count; });
  EXPECT_EQ(count, 52u);
  const std::vector<TransitionCounts> eight(8, TransitionCounts(2));
  EXPECT_EQ(enumerate_posterior(eight, 1.0).partitions.size(), 4140u);
  const std::vector<TransitionCounts> nine(9, TransitionCounts(2));
  EXPECT_THROW(enumerate_posterior(nine, 1.0), ConfigError);
}

TEST(CoClusterMatrix, Examples) {
  const std::vector<TransitionCounts> n(3, TransitionCounts(2));
  const ClusterAssignment p({0, 0, 1}, n), q({0, 1, 1}, n);
  const std::vector<ClusterAssignment> same{p, p};
  const auto m = co_cluster_matrix(same);
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(0, 2), 0.0);
  const std::vector<ClusterAssignment> mixed{p, q};
  const auto h = co_cluster_matrix(mixed);
  EXPECT_EQ(h(0, 1), 0.5);
  EXPECT_EQ(h(1, 2), 0.5);
  for (std::size_t u = 0; u < 3; ++u) EXPECT_EQ(h(u, u), 1.0);
  EXPECT_THROW(co_cluster_matrix(std::vector<ClusterAssignment>{}), ConfigError);
}

}  // namespace
}  // namespace camp
