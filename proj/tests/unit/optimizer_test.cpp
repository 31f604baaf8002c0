// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "moelaw/error.hpp"
#include "moelaw/law.hpp"
#include "moelaw/optimizer.hpp"
#include "oracles/oracles.hpp"

namespace moelaw {
namespace {

const ScalingConstants kRef;

// Frozen by tests/oracles/freeze_oracles.py.
constexpr double kGOpt = 6.777840727011485;
constexpr double kSOpt = 0.3148458021208289;

struct Row {
  double N, Na;
  double theoretical;  // percent
  int p001, p005;
};

const Row kRows[] = {
    {21e9, 3.6e9, 42.92, 22, 9},  {30e9, 3e9, 40.07, 21, 9},
    {80e9, 13e9, 33.18, 18, 7},   {106e9, 12e9, 31.43, 17, 7},
    {117e9, 5.1e9, 30.84, 16, 7}, {235e9, 22e9, 26.97, 14, 6},
    {355e9, 32e9, 24.91, 13, 6},  {671e9, 37e9, 22.04, 12, 5},
    {1e12, 32e9, 20.41, 11, 5},
};

TEST(Optima, ClosedForms) {
  EXPECT_NEAR(optimal_G(kRef), kGOpt, 1e-13);
  const OptimalS s = optimal_S(kRef);
  EXPECT_NEAR(s.value, kSOpt, 1e-14);
  EXPECT_FALSE(s.clamped);
}

TEST(Optima, Preconditions) {
  ScalingConstants c = kRef;
  c.e = 0;
  EXPECT_THROW(optimal_G(c), DomainError);
  c = kRef;
  c.m = -1;
  EXPECT_THROW(optimal_S(c), DomainError);
}

TEST(Optima, SVertexClamped) {
  ScalingConstants c = kRef;
  c.n = 1;  // vertex below zero
  OptimalS s = optimal_S(c);
  EXPECT_TRUE(s.clamped);
  EXPECT_EQ(s.value, 0);
  EXPECT_LT(s.vertex, 0);
  c.n = -20;
  s = optimal_S(c);
  EXPECT_TRUE(s.clamped);
  EXPECT_LT(s.value, 1);
  EXPECT_GT(s.vertex, 1);
}

TEST(TheoreticalRatio, ReferenceModels) {
  for (const auto& r : kRows) {
    EXPECT_NEAR(100 * theoretical_ratio(kRef, r.N, kGOpt, kSOpt).ratio, r.theoretical, 0.005)
        << r.N;
  }
}

TEST(TheoreticalRatio, ExtrapolatedAtSmallN) {
  const RatioEstimate r = theoretical_ratio(kRef, 1e6, kGOpt, kSOpt);
  EXPECT_GT(r.ratio, 1);
  EXPECT_TRUE(r.extrapolated);
}

TEST(TheoreticalRatio, NonPositiveStructureThrows) {
  ScalingConstants c = kRef;
  c.n = -40;
  EXPECT_THROW(theoretical_ratio(c, 1e10, kGOpt, 0.5), DomainError);
  EXPECT_THROW(theoretical_ratio(kRef, 0, kGOpt, kSOpt), DomainError);
}

TEST(TheoreticalRatio, IsStationaryPointOfLoss) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const ScalingConstants c = oracle::random_constants(rng);
    const double N = 1e10, G = optimal_G(c), S = optimal_S(c).value;
    const double r = theoretical_ratio(c, N, G, S).ratio;
    const auto along = [&](long double x) {
      return oracle::joint_loss(c, {N, 1e11, static_cast<double>(x), G, S});
    };
    const long double slope = oracle::central_difference(along, r * N, 1e-4L * r * N);
    const long double scale = (oracle::joint_loss(c, {N, 1e11, r * N, G, S}) - c.eps) / (r * N);
    EXPECT_LT(std::abs(static_cast<double>(slope / scale)), 1e-7) << i;
  }
}

TEST(EfficiencyRatio, ReferenceModels) {
  for (const auto& r : kRows) {
    const auto e1 = efficiency_aware_ratio(kRef, r.N, kGOpt, kSOpt, 0.001);
    const auto e5 = efficiency_aware_ratio(kRef, r.N, kGOpt, kSOpt, 0.005);
    EXPECT_EQ(std::lround(100 * e1.ratio), r.p001) << r.N;
    EXPECT_EQ(std::lround(100 * e5.ratio), r.p005) << r.N;
    EXPECT_TRUE(e1.converged);
    EXPECT_EQ(e1.steps, r.p001 - 1);
    EXPECT_DOUBLE_EQ(e1.Na, e1.ratio * r.N);
  }
}

TEST(EfficiencyRatio, MatchesDirectWalk) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    const ScalingConstants c = oracle::random_constants(rng);
    const double N = 5e10, G = optimal_G(c), S = optimal_S(c).value;
    const double thr = 1e-4 * (1 + i);
    int want = 100;
    for (int j = 2; j <= 100; ++j) {
      const long double prev = oracle::joint_loss(c, {N, 1e11, (j - 1) * 0.01 * N, G, S});
      const long double cur = oracle::joint_loss(c, {N, 1e11, j * 0.01 * N, G, S});
      if (prev - cur < thr) {
        want = j;
        break;
      }
    }
    EXPECT_EQ(std::lround(100 * efficiency_aware_ratio(c, N, G, S, thr).ratio), want) << i;
  }
}

TEST(EfficiencyRatio, IndependentOfTokens) {
  const auto a = efficiency_aware_ratio(kRef, 80e9, kGOpt, kSOpt, 0.001, 100, 1e10);
  const auto b = efficiency_aware_ratio(kRef, 80e9, kGOpt, kSOpt, 0.001, 100, 1e13);
  EXPECT_EQ(a.ratio, b.ratio);
}

TEST(EfficiencyRatio, StepLimit) {
  const auto e = efficiency_aware_ratio(kRef, 21e9, kGOpt, kSOpt, 1e-9, 5);
  EXPECT_FALSE(e.converged);
  EXPECT_EQ(e.steps, 4);
  EXPECT_NEAR(e.ratio, 0.05, 1e-15);
  EXPECT_THROW(efficiency_aware_ratio(kRef, 21e9, kGOpt, kSOpt, 0), DomainError);
  EXPECT_THROW(efficiency_aware_ratio(kRef, 21e9, kGOpt, kSOpt, 1e-3, 1), DomainError);
}

TEST(PracticalRange, GptOss20b) {
  const Interval g = practical_range_G(kRef, 21e9, 3.6e9, 0.001);
  EXPECT_NEAR(g.lo, 5.081006656, 1e-8);
  EXPECT_NEAR(g.hi, 9.041343188, 1e-8);
  const Interval s = practical_range_S(kRef, 21e9, 3.6e9, 0.001);
  EXPECT_NEAR(s.lo, 0.1829837272, 1e-9);
  EXPECT_NEAR(s.hi, 0.4467078770, 1e-9);
  EXPECT_FALSE(g.clipped_lo || g.clipped_hi || s.clipped_lo || s.clipped_hi);
}

TEST(PracticalRange, ZeroThresholdCollapses) {
  const Interval g = practical_range_G(kRef, 21e9, 3.6e9, 0);
  EXPECT_NEAR(g.lo, kGOpt, 1e-12);
  EXPECT_NEAR(g.hi, kGOpt, 1e-12);
}

TEST(PracticalRange, EndpointGapEqualsThreshold) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const double N = std::pow(10.0, 8 + 5 * u(rng));
    const double Na = N * std::pow(10.0, -3 * u(rng));
    const double thr = std::pow(10.0, -5 + 3 * u(rng));
    const auto gap = [&](double G, double S) {
      return static_cast<double>(oracle::joint_loss(kRef, {N, 1e11, Na, G, S}) -
                                 oracle::joint_loss(kRef, {N, 1e11, Na, kGOpt, kSOpt}));
    };
    const Interval g = practical_range_G(kRef, N, Na, thr);
    const Interval s = practical_range_S(kRef, N, Na, thr);
    if (!g.clipped_lo) {
      EXPECT_NEAR(gap(g.lo, kSOpt), thr, 1e-9);
    }
    EXPECT_NEAR(gap(g.hi, kSOpt), thr, 1e-9);
    if (!s.clipped_lo) {
      EXPECT_NEAR(gap(kGOpt, s.lo), thr, 1e-9);
    }
    if (!s.clipped_hi) {
      EXPECT_NEAR(gap(kGOpt, s.hi), thr, 1e-9);
    }
  }
}

TEST(PracticalRange, Clipping) {
  const Interval g = practical_range_G(kRef, 1e8, 1e7, 0.5);
  EXPECT_TRUE(g.clipped_lo);
  EXPECT_EQ(g.lo, 1.0);
  const Interval s = practical_range_S(kRef, 1e8, 1e7, 0.5);
  EXPECT_TRUE(s.clipped_lo);
  EXPECT_TRUE(s.clipped_hi);
  EXPECT_EQ(s.lo, 0.0);
  EXPECT_LT(s.hi, 1.0);
}

TEST(PracticalRange, Preconditions) {
  EXPECT_THROW(practical_range_G(kRef, 1e9, 2e9, 0.001), DomainError);
  EXPECT_THROW(practical_range_G(kRef, 1e9, 1e8, -1), DomainError);
  EXPECT_THROW(practical_range_S(kRef, -1, 1e8, 0.001), DomainError);
}

TEST(Frontier, ReferenceSummary) {
  const auto budgets = default_frontier_budgets();
  ASSERT_EQ(budgets.size(), 41u);
  EXPECT_DOUBLE_EQ(budgets.front(), 1e18);
  EXPECT_DOUBLE_EQ(budgets.back(), 1e22);
  const Frontier f = compute_optimal_frontier(kRef, 1e12, 7, 0.31, budgets);
  EXPECT_NEAR(f.C0, 1.873024804288, 1e-9);
  EXPECT_NEAR(f.structure, 1.629495807143, 1e-9);
  ASSERT_TRUE(f.summary);
  EXPECT_NEAR(f.summary->offset, 1.875, 0.001);
  EXPECT_NEAR(f.summary->coeff / 587.5, 1, 0.002);
  EXPECT_NEAR(f.summary->exponent, -0.1586, 0.0002);
}

TEST(Frontier, PointsAreConstrainedMinima) {
  const std::vector<double> budgets{1e19, 1e20, 1e21};
  const Frontier f = compute_optimal_frontier(kRef, 1e12, 7, 0.31, budgets);
  ASSERT_EQ(f.points.size(), 3u);
  for (const auto& p : f.points) {
    ASSERT_TRUE(p.has_root);
    EXPECT_NEAR(p.D_star * p.Na_star / p.C, 1, 1e-12);
    const auto along = [&](double log_na) {
      const double Na = std::exp(log_na);
      return oracle::joint_loss(kRef, {1e12, p.C / Na, Na, 7, 0.31});
    };
    const double x = std::log(p.Na_star);
    EXPECT_NEAR(p.L_star, static_cast<double>(along(x)), 1e-12);
    for (double dx : {-0.01, 0.01}) EXPECT_GT(along(x + dx), along(x));
  }
}

TEST(Frontier, BudgetWithoutRootIsFlagged) {
  const std::vector<double> budgets{1e6, 1e20};
  const Frontier f = compute_optimal_frontier(kRef, 1e12, 7, 0.31, budgets);
  ASSERT_EQ(f.points.size(), 2u);
  EXPECT_FALSE(f.points[0].has_root);
  EXPECT_TRUE(f.points[1].has_root);
  EXPECT_FALSE(f.summary);
}

TEST(PowerLaw, RecoversExactCurve) {
  const PowerLaw truth{1.9, 600, -0.16};
  const auto C = log_spaced(1e18, 1e22, 30);
  std::vector<double> L;
  for (double c : C) L.push_back(truth(c));
  const PowerLaw fit = fit_power_law(C, L);
  EXPECT_NEAR(fit.offset, 1.9, 1e-6);
  EXPECT_NEAR(fit.coeff / 600, 1, 1e-5);
  EXPECT_NEAR(fit.exponent, -0.16, 1e-7);
}

TEST(LogSpaced, Endpoints) {
  const auto v = log_spaced(1, 1000, 4);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_DOUBLE_EQ(v[0], 1);
  EXPECT_NEAR(v[1], 10, 1e-12);
  EXPECT_NEAR(v[2], 100, 1e-11);
  EXPECT_DOUBLE_EQ(v[3], 1000);
}

TEST(OptimaReport, DefaultsToOptima) {
  const OptimaReport r = make_optima_report(kRef, 21e9, std::nullopt, std::nullopt, 0.001);
  EXPECT_EQ(r.G, r.G_opt);
  EXPECT_EQ(r.S, r.S_opt.value);
  EXPECT_NEAR(100 * r.theoretical.ratio, 42.92, 0.005);
  EXPECT_EQ(std::lround(100 * r.efficiency.ratio), 22);
  const OptimaReport q = make_optima_report(kRef, 21e9, 4.0, 0.0, 0.001);
  EXPECT_EQ(q.G, 4.0);
  EXPECT_NEAR(q.structure, structure_term(kRef, 4, 0), 1e-15);
}

}  // namespace
}  // namespace moelaw
