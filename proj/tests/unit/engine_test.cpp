#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "camp/engine.hpp"
#include "camp/errors.hpp"
#include "camp/lemma.hpp"
#include "camp/synth.hpp"
#include "support.hpp"

namespace camp {
namespace {

using test::counts;

constexpr PruneLimits kNoPrune{std::numeric_limits<std::size_t>::max(), 0.0};

CampModel manual_model(std::vector<TransitionCounts> n, std::vector<ClusterAssignment> samples) {
  CampModel m;
  m.alphabet_size = n[0].size();
  for (std::size_t u = 0; u < n.size(); ++u) m.users.push_back("u" + std::to_string(u));
  m.counts = std::move(n);
  m.base = MixtureBase::uniform(m.alphabet_size);
  m.rounds.push_back(std::move(samples));
  return m;
}

void expect_kernel_near(const KernelEstimate& a, const KernelEstimate& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a(i, j), b(i, j), tol) << i << "," << j;
  }
}

TEST(UpdateAlpha, ClosedFormAndClamps) {
  EXPECT_NEAR(update_alpha(1.5, 2), 1.0, 1e-9);
  EXPECT_EQ(update_alpha(1.0, 5), kAlphaMin);
  EXPECT_EQ(update_alpha(0.5, 5), kAlphaMin);
  EXPECT_EQ(update_alpha(3.0, 3), kAlphaMax);
  EXPECT_THROW(update_alpha(1.0, 0), ConfigError);
  for (double target : {1.3, 2.7, 6.1, 9.5}) {
    const double a = update_alpha(target, 10);
    EXPECT_NEAR(expected_clusters(a, 10), target, 1e-6);
  }
}

TEST(UpdateAlpha, FromSamples) {
  const std::vector<TransitionCounts> n(2, TransitionCounts(2));
  const std::vector<ClusterAssignment> s{ClusterAssignment({0, 0}, n), ClusterAssignment({0, 1}, n)};
  EXPECT_NEAR(update_alpha(s, 2), 1.0, 1e-9);
}

TEST(UpdateBase, OneClusterIsConditionedUniform) {
  const std::vector<TransitionCounts> n{counts(3, "ABCA"), counts(3, "CB")};
  const std::vector<ClusterAssignment> s{ClusterAssignment::single_cluster(n)};
  const auto g = update_base(MixtureBase::uniform(3), s, n, kNoPrune);
  ASSERT_EQ(g.num_components(), 1u);
  EXPECT_DOUBLE_EQ(g.component(0).weight, 1.0);
  PseudoCounts expected(3);
  expected += n[0] + n[1];
  EXPECT_EQ(g.component(0).pseudo, expected);
}

TEST(UpdateBase, DuplicateSamplesAverageAway) {
  const std::vector<TransitionCounts> n{counts(3, "ABCA"), counts(3, "CB"), counts(3, "BAB")};
  const ClusterAssignment p({0, 1, 0}, n);
  const std::vector<ClusterAssignment> one{p}, two{p, p};
  const auto a = update_base(MixtureBase::uniform(3), one, n, kNoPrune);
  const auto b = update_base(MixtureBase::uniform(3), two, n, kNoPrune);
  ASSERT_EQ(a.num_components(), b.num_components());
  for (std::size_t m = 0; m < a.num_components(); ++m) {
    EXPECT_NEAR(a.component(m).weight, b.component(m).weight, 1e-15);
    EXPECT_EQ(a.component(m).pseudo, b.component(m).pseudo);
  }
  EXPECT_NEAR(a.component(0).weight + a.component(1).weight, 1.0, 1e-15);
}

TEST(UpdateBase, ComponentCountMultiplies) {
  const std::vector<TransitionCounts> n{counts(3, "ABCA"), counts(3, "CB"), counts(3, "BAB"), counts(3, "AC")};
  const std::vector<ClusterAssignment> s{ClusterAssignment({0, 0, 1, 1}, n), ClusterAssignment({0, 1, 1, 2}, n)};
  // Distinct clusters: {0,1} {2,3} {0} {1,2} {3}.
  const auto g1 = update_base(MixtureBase::uniform(3), s, n, kNoPrune);
  EXPECT_EQ(g1.num_components(), 5u);
  const auto g2 = update_base(g1, s, n, kNoPrune);
  EXPECT_EQ(g2.num_components(), 25u);
  double total = 0.0;
  for (const auto& c : g2.components()) total += c.weight;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(update_base(g1, s, n, {3, 0.0}).num_components(), 3u);
}

TEST(Fit, SingleUserIsDirichletPosterior) {
  const std::vector<TransitionCounts> n{counts(3, "ABACAB")};
  CampConfig cfg;
  cfg.iterations = 1;
  cfg.samples = 1;
  const auto model = fit(n, {"solo"}, cfg);
  expect_kernel_near(model.theta[0], posterior_mean(n[0], MixtureBase::uniform(3)), 1e-15);
  EXPECT_EQ(model.rounds.size(), 1u);
  EXPECT_EQ(model.alpha_history, std::vector<double>{1.0});
}

TEST(Fit, EmptyTrajectoriesGiveUniformKernels) {
  const std::vector<TransitionCounts> n(4, TransitionCounts(3));
  CampConfig cfg;
  cfg.samples = 2;
  cfg.sweeps = 3;
  const auto model = fit(n, {"a", "b", "c", "d"}, cfg);
  for (const auto& theta : model.theta) expect_kernel_near(theta, KernelEstimate::uniform(3), 1e-12);
}

TEST(Fit, InvariantsAndDeterminism) {
  SyntheticPrior prior;
  prior.locations = 4;
  prior.clusters = 2;
  prior.length = {5, 15};
  const auto traces = generate(prior, 10, 3).traces;
  CampConfig cfg;
  cfg.samples = 3;
  cfg.sweeps = 5;
  cfg.seed = 17;
  const auto a = fit(traces, cfg);
  auto threaded = cfg;
  threaded.threads = 2;
  const auto b = fit(traces, threaded);
  ASSERT_EQ(a.rounds.size(), 3u);
  EXPECT_EQ(a.alpha_history.size(), 3u);
  EXPECT_GE(a.alpha, kAlphaMin);
  EXPECT_LE(a.alpha, kAlphaMax);
  double weights = 0.0;
  for (const auto& c : a.base.components()) weights += c.weight;
  EXPECT_NEAR(weights, 1.0, 1e-12);
  for (std::size_t u = 0; u < a.num_users(); ++u) {
    for (std::size_t i = 0; i < 4; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < 4; ++j) row += a.theta[u](i, j);
      EXPECT_NEAR(row, 1.0, 1e-9);
    }
    expect_kernel_near(a.theta[u], b.theta[u], 0.0);
    expect_kernel_near(a.theta[u], estimate_theta(a, u), 1e-15);
  }
  EXPECT_THROW(estimate_theta(a, 10), DataError);
  EXPECT_THROW(a.user_index("nobody"), DataError);
  EXPECT_EQ(a.user_index(traces.trajectories[2].user_id), 2u);
}

TEST(Fit, RelabelingLocationsPermutesKernels) {
  SyntheticPrior prior;
  prior.locations = 3;
  prior.length = {4, 8};
  const auto traces = generate(prior, 6, 12).traces;
  const std::vector<Location> perm{2, 0, 1};
  auto relabeled = traces;
  for (auto& t : relabeled.trajectories) {
    for (auto& x : t.locations) x = perm[x];
  }
  CampConfig cfg;
  cfg.iterations = 2;
  cfg.samples = 2;
  cfg.sweeps = 4;
  const auto a = fit(traces, cfg);
  const auto b = fit(relabeled, cfg);
  for (std::size_t u = 0; u < a.num_users(); ++u) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a.theta[u](i, j), b.theta[u](perm[i], perm[j]), 1e-9);
    }
  }
}

TEST(Fit, RejectsBadConfig) {
  const std::vector<TransitionCounts> n(1, TransitionCounts(2));
  CampConfig cfg;
  cfg.iterations = 0;
  EXPECT_THROW(fit(n, {"a"}, cfg), ConfigError);
  cfg = {};
  cfg.samples = 0;
  EXPECT_THROW(fit(n, {"a"}, cfg), ConfigError);
  EXPECT_THROW(fit(std::vector<TransitionCounts>{}, {}, CampConfig{}), DataError);
}

TEST(EstimateTheta, PooledLaplaceWhenEveryoneShares) {
  const std::vector<TransitionCounts> n{counts(3, "ABCAB"), counts(3, "CBA"), counts(3, "BB")};
  const ClusterAssignment all = ClusterAssignment::single_cluster(n);
  const auto model = manual_model(n, {all, all});
  const auto pooled = n[0] + n[1] + n[2];
  for (std::size_t u = 0; u < 3; ++u) {
    const auto theta = estimate_theta(model, u);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(theta(i, j), (1.0 + pooled(i, j)) / (3.0 + pooled.row_sum(i)), 1e-14);
      }
    }
  }
}

TEST(EstimateTheta, AveragesOverSamples) {
  const std::vector<TransitionCounts> n{counts(2, "ABAB"), counts(2, "BAAB")};
  const auto model = manual_model(n, {ClusterAssignment({0, 0}, n), ClusterAssignment({0, 1}, n)});
  const auto together = posterior_mean(n[0] + n[1], model.base);
  const auto alone = posterior_mean(n[0], model.base);
  const auto theta = estimate_theta(model, 0);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(theta(i, j), 0.5 * (together(i, j) + alone(i, j)), 1e-15);
  }
}

TEST(WeightExpansion, SingleUserAtOneRound) {
  const std::vector<TransitionCounts> n{counts(3, "ABACABC")};
  const auto model = manual_model(n, {ClusterAssignment::single_cluster(n)});
  const auto w = lemma1_weights(model, 0);
  for (std::size_t i = 0; i < 3; ++i) {
    const double ni = n[0].row_sum(i);
    EXPECT_NEAR(w.eta[i], 1.0 / (3.0 + ni), 1e-14);
    EXPECT_NEAR(w.gamma(0, i), ni / (3.0 + ni), 1e-14);
  }
  expect_kernel_near(w.reconstruct(n), posterior_mean(n[0], model.base), 1e-14);
}

TEST(WeightExpansion, IdentityOnRandomInstances) {
  SyntheticPrior prior;
  prior.locations = 3;
  prior.clusters = 2;
  prior.length = {2, 6};
  for (int K : {1, 2}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto traces = generate(prior, 4, 40 + seed).traces;
      CampConfig cfg;
      cfg.iterations = K;
      cfg.samples = 3;
      cfg.sweeps = 5;
      cfg.seed = seed;
      cfg.prune = kNoPrune;
      const auto model = fit(traces, cfg);
      const ChainExpansion expansion(model);
      for (std::size_t u = 0; u < 4; ++u) {
        expect_kernel_near(expansion.weights(u).reconstruct(model.counts), model.theta[u], 1e-8);
      }
    }
  }
}

TEST(WeightExpansion, NeverCoClusteredHasNoWeight) {
  const std::vector<TransitionCounts> n{counts(2, "ABAB"), counts(2, "BABA"), counts(2, "AB")};
  const auto model = manual_model(n, {ClusterAssignment({0, 0, 1}, n), ClusterAssignment({0, 1, 2}, n)});
  const auto w = lemma1_weights(model, 0);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(w.gamma(2, i), 0.0);
    EXPECT_GT(w.gamma(1, i), 0.0);
  }
  expect_kernel_near(w.reconstruct(n), estimate_theta(model, 0), 1e-12);
}

TEST(WeightExpansion, BudgetIsEnforced) {
  const std::vector<TransitionCounts> n{counts(2, "ABAB"), counts(2, "BABA")};
  const auto model = manual_model(n, {ClusterAssignment({0, 1}, n)});
  EXPECT_THROW(ChainExpansion(model, 1), BudgetError);
  EXPECT_NO_THROW(ChainExpansion(model, 2));
}

TEST(StayingTime, WeightedMeans) {
  const std::vector<StaySamples> only_u{{0, {100.0, 200.0}}};
  EXPECT_DOUBLE_EQ(*estimate_staying_time(std::vector<double>{1.0}, only_u), 150.0);

  const std::vector<StaySamples> two{{0, {100.0}}, {1, {300.0}}};
  EXPECT_DOUBLE_EQ(*estimate_staying_time(std::vector<double>{0.4, 0.4}, two), 200.0);

  // u has no stay here; v is the only weighted user that does.
  const std::vector<StaySamples> fallback{{1, {50.0, 70.0}}};
  EXPECT_DOUBLE_EQ(*estimate_staying_time(std::vector<double>{0.9, 0.1}, fallback), 60.0);

  EXPECT_FALSE(estimate_staying_time(std::vector<double>{1.0, 0.0}, fallback).has_value());
  EXPECT_FALSE(estimate_staying_time(std::vector<double>{1.0}, std::vector<StaySamples>{}).has_value());
}

TEST(StayingTime, StaysAtLocation) {
  auto a = test::timed("a", "ABAB");
  a.staying_times = {10.0, 20.0, 30.0};
  auto b = test::timed("b", "BA");
  b.staying_times = {5.0};
  const auto traces = test::traces(2, {a, b});
  const auto at_a = stays_at(traces, 0);
  // The final visit has no completed stay.
  ASSERT_EQ(at_a.size(), 1u);
  EXPECT_EQ(at_a[0].user, 0u);
  EXPECT_EQ(at_a[0].stays, (std::vector<double>{10.0, 30.0}));
  const std::vector<std::size_t> visible{2, 2};
  const auto limited = stays_at(traces, 0, visible);
  ASSERT_EQ(limited.size(), 1u);
  EXPECT_EQ(limited[0].stays, std::vector<double>{10.0});
}

}  // namespace
}  // namespace camp
