#include <cmath>
#include <optional>
#include <random>

#include <gtest/gtest.h>

#include <stubvote/estimate.hpp>
#include <stubvote/ingest.hpp>

#include "test_util.hpp"

using namespace stubvote;
using stubvote::testing::data_path;
using stubvote::testing::error_kind_of;

namespace {

ObservationSeries series_of(int n, std::vector<std::pair<double, int>> pts) {
  std::vector<Observation> obs;
  for (auto [t, x] : pts) obs.push_back({t, x});
  return ObservationSeries(n, std::move(obs));
}

ObservationSeries random_series(std::mt19937& rng, int n, int length) {
  std::uniform_int_distribution<int> count(1, n - 1);
  std::uniform_real_distribution<double> gap(0.3, 5.0);
  std::vector<Observation> obs;
  double t = 0.0;
  for (int i = 0; i < length; ++i) {
    obs.push_back({t, count(rng)});
    t += gap(rng);
  }
  return ObservationSeries(n, std::move(obs));
}

/// Best couple by scanning every couple of S_n, no pruning; empty when every
/// couple is impossible.
std::optional<Couple> naive_argmax(const ObservationSeries& s) {
  LogLikelihood best;
  std::optional<Couple> arg;
  for (const auto& c : all_couples(s.n())) {
    const auto ll = log_likelihood(StubbornConfig(s.n(), c.s0, c.s1), s);
    if (!ll.is_impossible() && (!arg || ll > best)) {
      best = ll;
      arg = c;
    }
  }
  return arg;
}

}  // namespace

TEST(ObservationSeries, Validation) {
  EXPECT_EQ(error_kind_of([] { series_of(100, {}); }), ErrorKind::InsufficientData);
  EXPECT_EQ(error_kind_of([] { series_of(100, {{0, 101}}); }), ErrorKind::Domain);
  EXPECT_EQ(error_kind_of([] { series_of(100, {{0, -1}}); }), ErrorKind::Domain);
  EXPECT_EQ(error_kind_of([] { series_of(100, {{0, 10}, {0, 12}}); }), ErrorKind::Ordering);
  EXPECT_EQ(error_kind_of([] { series_of(100, {{1, 10}, {0, 12}}); }), ErrorKind::Ordering);
}

TEST(LogLikelihood, OrderingPutsImpossibleBelowEverything) {
  const auto impossible = LogLikelihood::impossible();
  EXPECT_LT(impossible, LogLikelihood(-1e300));
  EXPECT_EQ(impossible, LogLikelihood::impossible());
  EXPECT_EQ(impossible.value(), -std::numeric_limits<double>::infinity());
  EXPECT_GT(LogLikelihood(0.0), LogLikelihood(-0.5));
}

TEST(LogLikelihoodOp, FrozenCoupleExplainsRepeatedValue) {
  const auto s = series_of(100, {{0, 38}, {1, 38}});
  const auto ll = log_likelihood(StubbornConfig(100, 62, 38), s);
  ASSERT_FALSE(ll.is_impossible());
  EXPECT_EQ(ll.value(), 0.0);
}

TEST(LogLikelihoodOp, FrozenCoupleCannotMove) {
  const auto s = series_of(100, {{0, 38}, {1, 40}});
  EXPECT_TRUE(log_likelihood(StubbornConfig(100, 62, 38), s).is_impossible());
}

TEST(LogLikelihoodOp, TwoStateClosedForm) {
  const auto s = series_of(3, {{0, 1}, {1, 2}});
  const auto ll = log_likelihood(StubbornConfig(3, 1, 1), s);
  EXPECT_NEAR(ll.value(), std::log((1.0 - std::exp(-1.0)) / 2.0), 1e-12);
}

TEST(LogLikelihoodOp, NeedsTwoPoints) {
  const auto s = series_of(100, {{0, 38}});
  try {
    log_likelihood(StubbornConfig(100, 62, 38), s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
    EXPECT_STREQ(e.what(), "at least two datapoints required");
  }
}

TEST(FeasibleGrid, BoundaryArithmetic) {
  const auto s = series_of(100, {{0, 38}, {1, 38}});
  const auto grid = feasible_grid(100, s);
  for (const auto& c : grid) {
    EXPECT_LE(c.s1, 38);
    EXPECT_LE(c.s0, 62);
  }
  EXPECT_NE(std::find(grid.begin(), grid.end(), Couple{62, 38}), grid.end());
  EXPECT_EQ(grid.size(), 63u * 39u - 1u);
}

TEST(FeasibleGrid, FullSpaceSize) {
  EXPECT_EQ(all_couples(100).size(), 5150u);
  EXPECT_EQ(all_couples(3).size(), 9u);
  const auto s = series_of(100, {{0, 100}, {1, 0}});
  EXPECT_TRUE(feasible_grid(100, s).empty());
  EXPECT_EQ(error_kind_of([&] { fit_stubborn(s, 100); }), ErrorKind::NoFeasibleModel);
}

TEST(FeasibleGrid, GridOrderIsTieBreakOrder) {
  const auto s = series_of(20, {{0, 5}, {2, 9}});
  const auto grid = feasible_grid(20, s);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
}

TEST(FitStubborn, TwoRepeatedObservations) {
  const auto fit = fit_stubborn(series_of(100, {{1922, 38}, {1923, 38}}), 100);
  EXPECT_EQ(fit.best, StubbornConfig(100, 62, 38));
  EXPECT_EQ(fit.loglik.value(), 0.0);
  EXPECT_EQ(fit.evaluated, fit.surface.size());
}

TEST(FitStubborn, ConstantSeriesPicksFrozenCouple) {
  for (int k : {1, 17, 50, 99}) {
    const auto fit = fit_stubborn(series_of(100, {{0, k}, {1, k}, {2, k}}), 100);
    EXPECT_EQ(fit.best, StubbornConfig(100, 100 - k, k));
  }
}

TEST(FitStubborn, ConstantSeriesStaysArgmaxWhenExtended) {
  std::vector<std::pair<double, int>> pts{{0, 23}, {4, 23}};
  for (int extra = 0; extra < 4; ++extra) {
    pts.push_back({pts.back().first + 3.5, 23});
    EXPECT_EQ(fit_stubborn(series_of(60, pts), 60).best, StubbornConfig(60, 37, 23));
  }
}

TEST(FitStubborn, UkLabourFullSeries) {
  const auto s = binarize(load_elections(data_path("uk_elections.csv")), "LAB");
  const auto fit = fit_stubborn(s, 100);
  EXPECT_EQ(fit.best, StubbornConfig(100, 24, 15));
}

TEST(FitStubborn, Errors) {
  EXPECT_EQ(error_kind_of([] { fit_stubborn(series_of(100, {{0, 40}}), 100); }), ErrorKind::InsufficientData);
  EXPECT_EQ(error_kind_of([] { fit_stubborn(series_of(100, {{0, 40}, {1, 41}}), 50); }), ErrorKind::Parameter);
  // s1 must be 0, making state 0 absorbing, so the move 0 -> 3 is impossible everywhere
  EXPECT_EQ(error_kind_of([] { fit_stubborn(series_of(10, {{0, 0}, {1, 3}}), 10); }), ErrorKind::NoFeasibleModel);
}

TEST(FitStubborn, ArgmaxTieBreakPrefersEarliest) {
  std::vector<SurfacePoint> surface{{{0, 3}, LogLikelihood(-2.0)},
                                    {{1, 1}, LogLikelihood(-1.0)},
                                    {{1, 2}, LogLikelihood(-1.0)},
                                    {{2, 0}, LogLikelihood::impossible()}};
  EXPECT_EQ(detail::argmax(surface), 1u);
}

TEST(FitStubborn, PruningIsSound) {
  std::mt19937 rng(17);
  for (int n : {5, 9, 14, 20}) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto s = random_series(rng, n, 4);
      const auto grid = feasible_grid(n, s);
      for (const auto& c : all_couples(n)) {
        if (std::find(grid.begin(), grid.end(), c) != grid.end()) continue;
        EXPECT_TRUE(log_likelihood(StubbornConfig(n, c.s0, c.s1), s).is_impossible());
      }
    }
  }
}

TEST(FitStubborn, MatchesUnprunedScan) {
  std::mt19937 rng(3);
  int fitted = 0;
  for (int n : {4, 7, 12, 20}) {
    for (int trial = 0; trial < 8; ++trial) {
      const auto s = random_series(rng, n, 5);
      const auto naive = naive_argmax(s);
      try {
        const auto fit = fit_stubborn(s, n);
        ASSERT_TRUE(naive.has_value());
        EXPECT_EQ(fit.best, StubbornConfig(n, naive->s0, naive->s1));
        ++fitted;
      } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoFeasibleModel);
        EXPECT_FALSE(naive.has_value());
      }
    }
  }
  EXPECT_GT(fitted, 10);
}

TEST(FitStubborn, IndependentOfWorkerCount) {
  const auto s = series_of(60, {{0, 20}, {3, 31}, {5, 25}, {9, 28}, {12, 35}});
  const auto one = fit_stubborn(s, 60, 1);
  const auto four = fit_stubborn(s, 60, 4);
  EXPECT_EQ(one.best, four.best);
  ASSERT_EQ(one.surface.size(), four.surface.size());
  for (std::size_t i = 0; i < one.surface.size(); ++i) {
    EXPECT_EQ(one.surface[i].couple, four.surface[i].couple);
    EXPECT_EQ(one.surface[i].loglik, four.surface[i].loglik);
  }
}
