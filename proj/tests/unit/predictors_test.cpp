#include <gtest/gtest.h>

#include "camp/errors.hpp"
#include "camp/oracle.hpp"
#include "camp/predictors.hpp"
#include "support.hpp"

namespace camp {
namespace {

using test::path;

MarkovStats stats(std::string_view letters, std::size_t L = 3) {
  return MarkovStats::from_prefix(path(letters), L);
}

TEST(PredictorKind, NamesRoundTrip) {
  for (auto kind : {PredictorKind::kMarkov, PredictorKind::kMarkovO2, PredictorKind::kAgg, PredictorKind::kAggC,
                    PredictorKind::kCamp, PredictorKind::kCampC}) {
    EXPECT_EQ(parse_predictor(to_string(kind)), kind);
  }
  EXPECT_EQ(parse_predictor("markov2"), PredictorKind::kMarkovO2);
  EXPECT_THROW(parse_predictor("nextplace"), ConfigError);
}

TEST(VisibleCounts, ByKind) {
  const auto traces = test::traces(3, {test::timed("u", "ABCAB", {10, 20, 30, 40, 50}),
                                       test::timed("v", "CBCA", {5, 15, 25, 60})});
  const PredictionRequest at30{0, 3, 30};

  const auto markov = visible_counts(traces, at30, PredictorKind::kMarkov);
  EXPECT_EQ(markov[0], test::counts(3, "AB"));
  EXPECT_TRUE(markov[1].empty());

  const auto agg = visible_counts(traces, at30, PredictorKind::kAgg);
  EXPECT_EQ(agg[1], test::counts(3, "CBC"));
  EXPECT_EQ(visible_lengths(traces, at30, PredictorKind::kCamp), (std::vector<std::size_t>{2, 3}));

  const auto full = visible_counts(traces, at30, PredictorKind::kCampC);
  EXPECT_EQ(full[0], test::counts(3, "AB"));
  EXPECT_EQ(full[1], test::counts(3, "CBCA"));

  const PredictionRequest early{0, 2, 0};
  const auto cold = visible_counts(traces, early, PredictorKind::kCampC);
  EXPECT_TRUE(cold[0].empty());
  EXPECT_EQ(cold[1], test::counts(3, "CBCA"));

  const PredictionRequest unbounded{0, 3};
  EXPECT_EQ(visible_counts(traces, unbounded, PredictorKind::kCamp),
            visible_counts(traces, unbounded, PredictorKind::kCampC));

  EXPECT_THROW(visible_counts(traces, {0, 1, 30}, PredictorKind::kAgg), ConfigError);
  EXPECT_THROW(visible_counts(traces, {5, 2, 30}, PredictorKind::kAgg), DataError);
}

TEST(PredictMarkov, Examples) {
  EXPECT_EQ(predict_markov(stats("ABAB"), 1), 0);
  EXPECT_EQ(predict_markov(stats("ABA"), 2), 0);   // unvisited row: most frequent
  EXPECT_EQ(predict_markov(stats("BABC"), 1), 0);  // tie n_BA = n_BC
  EXPECT_EQ(predict_markov(stats("CBCB"), 0), 1);  // fallback tie B/C
  EXPECT_EQ(predict_markov(MarkovStats(3), 2), 0);
}

TEST(PredictMarkov, NeverStaysPutWhenRowHasData) {
  const auto s = stats("ABCBABACAB");
  for (Location i = 0; i < 3; ++i) {
    if (s.counts.row_sum(i) > 0) EXPECT_NE(predict_markov(s, i), i);
  }
}

TEST(MarkovStats, IncrementalMatchesPrefix) {
  MarkovStats s(3);
  std::optional<Location> previous;
  for (Location x : path("ABCACB")) {
    s.observe(previous, x);
    previous = x;
  }
  const auto direct = stats("ABCACB");
  EXPECT_EQ(s.counts, direct.counts);
  EXPECT_EQ(s.visits, direct.visits);
  auto sum = stats("AB");
  sum += stats("CA");
  EXPECT_EQ(sum.visits, (std::vector<int>{2, 1, 1}));
}

TEST(PredictMarkov2, Examples) {
  EXPECT_EQ(predict_markov2(path("ABCAB"), 3), 2);
  // Pair (C,B) never seen before; order-1 from B says A.
  EXPECT_EQ(predict_markov2(path("BACB"), 3), 0);
  EXPECT_EQ(predict_markov2(path("AB"), 3), predict_markov(stats("AB"), 1));
  EXPECT_EQ(predict_markov2(path("A"), 3), 0);

  const auto o2 = SecondOrderStats::from_prefix(path("ABCABA"), 3);
  EXPECT_EQ(o2.count(0, 1, 2), 1);
  EXPECT_EQ(o2.count(0, 1, 0), 1);
  EXPECT_EQ(o2.count(2, 1, 0), 0);
  EXPECT_EQ(o2.predict(), predict_markov2(path("ABCABA"), 3));
}

TEST(PredictAgg, Examples) {
  const std::vector<MarkovStats> two{stats("AC"), stats("AC")};
  EXPECT_EQ(predict_agg(two, 0), 2);
  const std::vector<MarkovStats> empty_row{stats("BA"), stats("AB")};
  EXPECT_EQ(predict_agg(empty_row, 2), 0);  // pooled visits A=2 B=2
  for (const char* s : {"ABCB", "CACB", "BBA"}) {
    const std::vector<MarkovStats> one{stats(s)};
    for (Location i = 0; i < 3; ++i) EXPECT_EQ(predict_agg(one, i), predict_markov(stats(s), i));
  }
}

CampConfig small_camp(int K = 1, int B = 1, int M = 1) {
  CampConfig c;
  c.iterations = K;
  c.samples = B;
  c.sweeps = M;
  return c;
}

TEST(PredictCamp, SingleUserIsLaplaceArgmax) {
  const auto traces = test::traces(3, {test::timed("u", "ABCACACB")});
  const PredictionRequest r{0, 8};
  const auto n = test::counts(3, "ABCACAC");
  const auto laplace = posterior_mean(n, MixtureBase::uniform(3));
  EXPECT_EQ(predict_camp(traces, r, PredictorKind::kCamp, small_camp()), laplace.argmax(2));
  EXPECT_EQ(predict_camp(traces, r, PredictorKind::kCamp, small_camp()), 0);
}

TEST(PredictCamp, BorrowsFromLookAlikes) {
  const auto traces = test::traces(3, {test::trajectory("long1", "ABCABCABCABCABC"),
                                       test::trajectory("long2", "ABCABCABCABCABC"),
                                       test::trajectory("short", "ABC")});
  const PredictionRequest r{2, 3};
  const auto counts = visible_counts(traces, r, PredictorKind::kCampC);
  const auto exact = enumerate_posterior(counts, 1.0);
  const Location expected = exact.expected_theta[2].argmax(1);
  EXPECT_EQ(expected, 2);
  EXPECT_EQ(predict_camp(traces, r, PredictorKind::kCampC, small_camp(1, 8, 10)), expected);
  // The user's own data alone cannot tell.
  EXPECT_EQ(predict_markov(stats("AB"), 1), 0);
}

TEST(PredictCamp, EmptyDataPredictsZero) {
  const auto traces = test::traces(3, {test::trajectory("a", "B"), test::trajectory("b", "C")});
  EXPECT_EQ(predict_camp(traces, {0, 2}, PredictorKind::kCamp, small_camp()), 0);
  EXPECT_THROW(predict_camp(traces, {0, 2}, PredictorKind::kAgg, small_camp()), ConfigError);
}

TEST(RefitSchedule, Policies) {
  EXPECT_EQ(refit_schedule("event").epoch, 1u);
  EXPECT_EQ(refit_schedule("1").epoch, RefitSchedule::per_event().epoch);
  EXPECT_TRUE(refit_schedule("static").is_static());
  EXPECT_TRUE(refit_schedule("inf").is_static());
  EXPECT_EQ(refit_schedule("40").epoch, 40u);
  EXPECT_EQ(RefitSchedule{}.epoch, 25u);
  EXPECT_THROW(refit_schedule("0"), ConfigError);
  EXPECT_THROW(refit_schedule("-3"), ConfigError);
  EXPECT_THROW(refit_schedule("often"), ConfigError);
  EXPECT_TRUE(RefitSchedule::per_epoch(3).due(3));
  EXPECT_FALSE(RefitSchedule::per_epoch(3).due(2));
  EXPECT_FALSE(RefitSchedule::static_model().due(1000));
  EXPECT_EQ(RefitSchedule::per_epoch(25).describe(), "epoch:25");
  EXPECT_EQ(RefitSchedule::per_event().describe(), "event");
  EXPECT_EQ(RefitSchedule::static_model().describe(), "static");
}

}  // namespace
}  // namespace camp
