// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "moelaw/arch.hpp"
#include "moelaw/error.hpp"

namespace moelaw {
namespace {

// layers, d_hidden, d_head, n_h, d_expert, n_e, n_k, n_s
ArchitectureSpec spec(std::int64_t l, std::int64_t d, std::int64_t nh,
                      std::int64_t de) {
  return {l, d, 64, nh, de, 32, 4, 1};
}

struct Headline {
  ArchitectureSpec spec;
  double N, Na;
};

const std::array<Headline, 5> kTable1{{
    {spec(12, 512, 8, 384), 247e6, 48e6},
    {spec(12, 768, 12, 512), 496e6, 99e6},
    {spec(12, 1024, 16, 704), 907e6, 181e6},
    {spec(20, 1280, 20, 896), 2.40e9, 476e6},
    {spec(24, 1536, 24, 1024), 3.96e9, 793e6},
}};

const ArchitectureSpec kUvBase{20, 1280, 64, 20, 224, 128, 16, 4};

TEST(CountParams, ExactArithmetic) {
  const ParamCount pc = count_params(kTable1[0].spec);
  EXPECT_EQ(pc.N, 246153216.0);
  EXPECT_EQ(pc.Na, 47972352.0);
  EXPECT_EQ(pc.G, 5);
  EXPECT_DOUBLE_EQ(pc.S, 0.2);
  EXPECT_EQ(count_params(kTable1[1].spec).Na, 99090432.0);
  EXPECT_EQ(count_params(kTable1[1].spec).N, 495452160.0);
}

TEST(CountParams, HeadlineSizesWithinTwoPercent) {
  for (const auto& row : kTable1) {
    const ParamCount pc = count_params(row.spec);
    EXPECT_NEAR(pc.N / row.N, 1.0, 0.02);
    EXPECT_NEAR(pc.Na / row.Na, 1.0, 0.02);
  }
}

TEST(CountParams, DenseLimit) {
  ArchitectureSpec s = kTable1[2].spec;
  s.n_e = s.n_k;
  s.n_s = 0;
  const ParamCount pc = count_params(s);
  EXPECT_EQ(pc.N, pc.Na);
  EXPECT_EQ(pc.S, 0);
}

TEST(CountParams, FactorPoint) {
  const FactorPoint p = to_factor_point(kTable1[0].spec, 2e10);
  EXPECT_EQ(p.D, 2e10);
  EXPECT_EQ(p.N, 246153216.0);
  EXPECT_EQ(p.G, 5);
}

TEST(Validate, RejectsBadSpecs) {
  ArchitectureSpec s = kTable1[0].spec;
  s.n_k = 40;  // more active than routed
  EXPECT_THROW(s.validate(), DomainError);
  s = kTable1[0].spec;
  s.layers = 0;
  EXPECT_THROW(count_params(s), DomainError);
  s = kTable1[0].spec;
  s.n_s = -1;
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(UvScaling, ReproducesExpertCounts) {
  const double u[] = {0.5, 1, 2, 4, 6};
  const std::int64_t n_e[] = {260, 128, 62, 29, 18};
  const std::int64_t d_e[] = {112, 224, 448, 896, 1344};
  for (int i = 0; i < 5; ++i) {
    const ArchitectureSpec s = derive_uv_scaling(kUvBase, u[i]);
    EXPECT_EQ(s.n_e, n_e[i]) << "u=" << u[i];
    EXPECT_EQ(s.d_expert, d_e[i]) << "u=" << u[i];
  }
  EXPECT_EQ(derive_uv_scaling(kUvBase, 1.0), kUvBase);
}

TEST(UvScaling, AppendixLevelsKeepTotalSize) {
  const double N0 = count_params(kUvBase).N;
  for (double u : {0.5, 1.0, 2.0, 4.0, 6.0}) {
    EXPECT_NEAR(count_params(derive_uv_scaling(kUvBase, u)).N / N0, 1.0, 0.01)
        << "u=" << u;
  }
}

// With few routed experts, rounding n_e*v can move N by more than 1%. The
// drift must stay within what rounding d_expert and n_e by half a unit each
// can produce.
TEST(UvScaling, TotalSizeDriftIsRoundingOnly) {
  for (const auto& row : kTable1) {
    const ArchitectureSpec& b = row.spec;
    const double N0 = count_params(b).N;
    for (double u = 0.25; u <= 6.0; u += 0.25) {
      ArchitectureSpec s;
      try {
        s = derive_uv_scaling(b, u);
      } catch (const DomainError&) {
        continue;  // too few routed experts left for n_k
      }
      const double v = ((1 - u) * b.n_s + b.n_e) / (u * b.n_e);
      const double per_row = 0.5 * (v * b.n_e + b.n_s) + 0.5 * u * b.d_expert + 0.25;
      const double bound = 3.0 * b.layers * b.d_hidden * per_row;
      EXPECT_LE(std::abs(count_params(s).N - N0), bound * (1 + 1e-12)) << "u=" << u;
    }
  }
}

TEST(UvScaling, RejectsNonPositive) {
  EXPECT_THROW(derive_uv_scaling(kUvBase, 0.0), DomainError);
  EXPECT_THROW(derive_uv_scaling(kUvBase, -2.0), DomainError);
  EXPECT_THROW(derive_uv_scaling(kUvBase, 100.0), DomainError);  // n_e < n_k
}

TEST(Sweep, SharedRatioLevels) {
  const double levels[] = {0, 0.2, 0.4};
  const SweepPlan plan = plan_sweep(kTable1[0].spec, Factor::S, levels);
  ASSERT_EQ(plan.levels.size(), 3u);
  const std::int64_t n_s[] = {0, 1, 2}, n_k[] = {5, 4, 3};
  const double N0 = count_params(kTable1[0].spec).N;
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(plan.levels[i].spec.n_s, n_s[i]);
    EXPECT_EQ(plan.levels[i].spec.n_k, n_k[i]);
    EXPECT_DOUBLE_EQ(plan.levels[i].counts.S, levels[i]);
    EXPECT_EQ(plan.levels[i].counts.N, N0);
    EXPECT_EQ(plan.levels[i].counts.G, 5);
  }
}

TEST(Sweep, GranularityHoldsSizesFixed) {
  const double levels[] = {5, 10, 20};
  const SweepPlan plan = plan_sweep(kUvBase, Factor::G, levels);
  const ParamCount base = count_params(kUvBase);
  for (const auto& l : plan.levels) {
    EXPECT_EQ(l.counts.G, l.value);
    EXPECT_DOUBLE_EQ(l.counts.S, 0.2);
    EXPECT_EQ(l.counts.N, base.N);
    EXPECT_EQ(l.counts.Na, base.Na);
  }
  EXPECT_EQ(plan.levels[0].spec.d_expert, 896);
  EXPECT_EQ(plan.levels[0].spec.n_e, 32);
}

TEST(Sweep, UnrealizableLevelsNameTheReason) {
  const double g3[] = {3};
  try {
    plan_sweep(kUvBase, Factor::G, g3);
    FAIL() << "expected IntegralityError";
  } catch (const IntegralityError& e) {
    EXPECT_NE(std::string(e.what()).find("G level 3"), std::string::npos);
  }
  const double s_bad[] = {0.3};  // 0.3 * 5 is not an integer
  EXPECT_THROW(plan_sweep(kTable1[0].spec, Factor::S, s_bad), IntegralityError);
  const double g_frac[] = {2.5};
  EXPECT_THROW(plan_sweep(kUvBase, Factor::G, g_frac), IntegralityError);
}

TEST(Sweep, ActiveAndTotalSizeLevels) {
  const double na[] = {2.4e8, 4.76e8, 9.5e8};
  const SweepPlan a = plan_sweep(kUvBase, Factor::Na, na);
  for (const auto& l : a.levels) {
    EXPECT_NEAR(l.counts.Na / l.value, 1.0, kSweepDriftTolerance);
    EXPECT_LE(l.drift, kSweepDriftTolerance);
  }
  // Levels that whole routed experts can hit.
  std::vector<double> n;
  for (std::int64_t ne : {16, 48, 64}) {
    ArchitectureSpec s = kTable1[3].spec;
    s.n_e = ne;
    n.push_back(count_params(s).N);
  }
  const SweepPlan b = plan_sweep(kTable1[3].spec, Factor::N, n);
  for (const auto& l : b.levels) {
    EXPECT_NEAR(l.counts.N / l.value, 1.0, kSweepDriftTolerance);
    EXPECT_EQ(l.counts.Na, count_params(kTable1[3].spec).Na);
  }
  const double off_grid[] = {1.2e9};  // no whole expert count lands within 1%
  EXPECT_THROW(plan_sweep(kTable1[3].spec, Factor::N, off_grid), IntegralityError);
  EXPECT_TRUE(b.levels[2].extrapolated);
}

TEST(Sweep, AppendixActiveSizeLevels) {
  const double na[] = {303e6, 476e6, 819e6, 1507e6, 2196e6};
  const std::int64_t d_e[] = {112, 224, 448, 896, 1344};
  const SweepPlan plan = plan_sweep(kUvBase, Factor::Na, na);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(plan.levels[i].spec.d_expert, d_e[i]);
}

TEST(Sweep, BaseLevelIsIdentity) {
  const double g[] = {5};
  EXPECT_EQ(plan_sweep(kTable1[0].spec, Factor::G, g).levels[0].spec, kTable1[0].spec);
}

TEST(Sweep, RandomBasesKeepOtherFactorsFixed) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> pick(0, 4);
  int realized = 0;
  for (int trial = 0; trial < 300; ++trial) {
    ArchitectureSpec b = kTable1[static_cast<std::size_t>(pick(rng))].spec;
    b.n_e = 16 << pick(rng);
    b.n_k = 2 << (pick(rng) % 3);
    b.n_s = pick(rng) % 3;
    const ParamCount pc = count_params(b);
    const double levels[] = {pc.Na * 0.5, pc.Na * 2};
    SweepPlan plan;
    try {
      plan = plan_sweep(b, Factor::Na, levels);
    } catch (const IntegralityError&) {
      continue;
    }
    for (const auto& l : plan.levels) {
      EXPECT_LE(std::abs(l.counts.N / pc.N - 1), kSweepDriftTolerance);
      EXPECT_EQ(l.counts.G, pc.G);
      ++realized;
    }
  }
  EXPECT_GT(realized, 50);
}

TEST(CountParams, MonotoneInEveryField) {
  const ArchitectureSpec b = kTable1[1].spec;
  const ParamCount p0 = count_params(b);
  for (int f = 0; f < 8; ++f) {
    ArchitectureSpec s = b;
    std::int64_t* fields[] = {&s.layers, &s.d_hidden, &s.d_head, &s.n_h,
                              &s.d_expert, &s.n_e, &s.n_k, &s.n_s};
    *fields[f] += 1;
    const ParamCount p = count_params(s);
    EXPECT_GE(p.N, p0.N) << f;
    EXPECT_GE(p.Na, p0.Na) << f;
  }
}

TEST(Sweep, TokenLevelsKeepSpec) {
  const double d[] = {1e10, 1e12};
  const SweepPlan plan = plan_sweep(kTable1[0].spec, Factor::D, d);
  EXPECT_EQ(plan.levels[0].spec, kTable1[0].spec);
  EXPECT_FALSE(plan.levels[0].extrapolated);
  EXPECT_TRUE(plan.levels[1].extrapolated);
}

TEST(Sweep, CsvLayout) {
  const double levels[] = {0, 0.2};
  std::ostringstream os;
  write_sweep_csv(plan_sweep(kTable1[0].spec, Factor::S, levels), os);
  std::string header;
  std::istringstream in(os.str());
  std::getline(in, header);
  EXPECT_EQ(header, "level,layers,d_hidden,d_head,n_h,d_expert,n_e,n_k,n_s,N,Na,G,S");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 2);
}

}  // namespace
}  // namespace moelaw
