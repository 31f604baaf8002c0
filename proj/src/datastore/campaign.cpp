// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>

#include "moelaw/datastore.hpp"
#include "moelaw/error.hpp"
#include "moelaw/law.hpp"

namespace moelaw {

namespace {

constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;

std::string make_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%04zu", prefix, i);
  return buf;
}

double log_lerp(FactorRange r, double t) {
  return std::exp(std::log(r.min) + t * (std::log(r.max) - std::log(r.min)));
}

std::vector<double> log_levels(FactorRange r, std::size_t n) {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(log_lerp(r, n == 1 ? 0.0 : double(i) / double(n - 1)));
  }
  return out;
}

void check_range(FactorRange r, const char* name, bool positive) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max ||
      (positive && !(r.min > 0))) {
    throw DomainError(std::string("invalid campaign range for ") + name);
  }
}

// Latin-hypercube columns: one stratum per point, shuffled per column.
std::vector<std::vector<double>> lhs(std::size_t n, std::size_t dims,
                                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> cols(dims, std::vector<double>(n));
  for (auto& col : cols) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = (static_cast<double>(perm[i]) + u(rng)) / static_cast<double>(n);
    }
  }
  return cols;
}

// Integer G in [lo, hi] and S = n_s/G with S <= s_max.
std::pair<double, double> expert_layout(double tg, double ts, FactorRange G,
                                        FactorRange S) {
  const double g_lo = std::max(1.0, std::ceil(G.min));
  const double g_hi = std::max(g_lo, std::floor(G.max));
  const double g = std::min(g_hi, g_lo + std::floor(tg * (g_hi - g_lo + 1)));
  const double max_shared = std::floor(S.max * g + 1e-9);
  const double min_shared = std::ceil(S.min * g - 1e-9);
  double shared = min_shared;
  if (max_shared > min_shared) {
    shared = std::min(max_shared,
                      min_shared + std::floor(ts * (max_shared - min_shared + 1)));
  }
  double s = shared / g;
  if (s >= 1.0) s = 0.0;  // G = 1 cannot have a shared expert fraction of 1
  return {g, s};
}

struct Builder {
  const ScalingConstants& constants;
  Campaign& campaign;

  void add(const char* prefix, std::size_t& counter, FactorPoint p,
           Tags tags) {
    p.Na = std::min(p.Na, p.N);
    validate(p);
    ExperimentRecord r;
    r.id = make_id(prefix, ++counter);
    r.point = p;
    r.loss = eval_joint_loss(constants, p);
    r.tags = std::move(tags);
    campaign.records.push_back(std::move(r));
  }
};

bool outside(FactorRange inner, FactorRange outer) {
  return inner.min < outer.min * (1 - 1e-12) ||
         inner.max > outer.max * (1 + 1e-12);
}

}  // namespace

Campaign generate_campaign(const ScalingConstants& constants,
                           const CampaignLayout& layout, double sigma,
                           std::uint64_t seed) {
  if (!(sigma >= 0) || !std::isfinite(sigma)) {
    throw DomainError("noise sigma must be >= 0");
  }
  check_range(layout.N, "N", true);
  check_range(layout.D, "D", true);
  check_range(layout.Na, "Na", true);
  check_range(layout.G, "G", true);
  check_range(layout.S, "S", false);
  check_range(layout.val_N, "validation N", true);
  check_range(layout.val_D, "validation D", true);
  check_range(layout.val_Na, "validation Na", true);
  if (layout.G.min < 1 || layout.S.min < 0 || layout.S.max >= 1) {
    throw DomainError("campaign G must be >= 1 and S within [0, 1)");
  }
  if (layout.fit_points < kStructuredFitPoints) {
    throw DomainError("fit tier needs at least " +
                      std::to_string(kStructuredFitPoints) + " points");
  }

  Campaign c;
  c.provenance.kind = Provenance::Kind::Synthetic;
  c.provenance.constants = constants;
  c.provenance.sigma = sigma;
  c.provenance.seed = seed;

  const CampaignLayout study;
  if (outside(layout.N, study.N) || outside(layout.D, study.D) ||
      outside(layout.Na, study.Na) || outside(layout.G, study.G) ||
      outside(layout.S, study.S)) {
    c.warnings.push_back("fit-tier ranges extend beyond the study grid");
  }
  if (outside(layout.val_N, study.val_N) || outside(layout.val_D, study.val_D)) {
    c.warnings.push_back("validation ranges extend beyond the study grid");
  }

  std::mt19937_64 rng(seed);
  Builder b{constants, c};
  std::size_t fit_id = 0, small_id = 0, val_id = 0;
  const auto tags = [](const char* tier, const char* sweep, std::size_t group) {
    return Tags{{"tier", tier}, {"sweep", sweep},
                {"group", std::to_string(group)}};
  };
  const auto clamp_na = [&](double na) {
    return std::clamp(na, layout.Na.min, layout.Na.max);
  };
  const double d_mid = log_lerp(layout.D, 0.5);

  // Fit tier: N-D grid at a fixed expert layout and activation ratio.
  for (double N : log_levels(layout.N, 6)) {
    for (double D : log_levels(layout.D, 5)) {
      b.add("fit", fit_id, {N, D, clamp_na(0.25 * N), 5, 0.2},
            tags("fit", "nd", 0));
    }
  }
  // Activation-ratio sweeps at fixed N, D, G, S.
  const double ratios[] = {0.08, 0.12, 0.18, 0.25, 0.35, 0.5, 0.7, 0.9};
  std::size_t group = 0;
  for (double t : {0.35, 0.7, 0.9}) {
    const double N = log_lerp(layout.N, t);
    for (double D : {log_lerp(layout.D, 0.25), layout.D.max}) {
      ++group;
      for (double r : ratios) {
        b.add("fit", fit_id, {N, D, clamp_na(r * N), 8, 0.125},
              tags("fit", "na", group));
      }
    }
  }
  // Shared-ratio sweeps at G = 10.
  group = 0;
  for (double t : {0.5, 0.7, 0.9}) {
    const double N = log_lerp(layout.N, t);
    ++group;
    for (int i = 0; i < 8; ++i) {
      const double s = layout.S.min + (layout.S.max - layout.S.min) * i / 7.0;
      b.add("fit", fit_id,
            {N, log_lerp(layout.D, 0.2 * group), clamp_na(0.2 * N), 10, s},
            tags("fit", "s", group));
    }
  }
  // Granularity sweeps without shared experts.
  group = 0;
  const double g_levels[] = {1, 2, 4, 6, 8, 12, 16, 20};
  for (double t : {0.6, 0.85}) {
    const double N = log_lerp(layout.N, t);
    ++group;
    for (double g : g_levels) {
      b.add("fit", fit_id,
            {N, d_mid, clamp_na(0.2 * N),
             std::clamp(g, layout.G.min, layout.G.max), 0.0},
            tags("fit", "g", group));
    }
  }
  // Random fill.
  {
    const std::size_t n = layout.fit_points - kStructuredFitPoints;
    const auto u = lhs(n, 5, rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double N = log_lerp(layout.N, u[0][i]);
      const double na_hi = std::min(N, layout.Na.max);
      const double na_lo = std::min(na_hi, std::max(layout.Na.min, 0.05 * N));
      const auto [g, s] = expert_layout(u[3][i], u[4][i], layout.G, layout.S);
      b.add("fit", fit_id,
            {N, log_lerp(layout.D, u[1][i]), log_lerp({na_lo, na_hi}, u[2][i]),
             g, s},
            tags("fit", "random", 0));
    }
  }

  // Small-scale granularity tier: 3 sizes x 3 data sizes x 10 G levels by
  // default; extra points cycle through the same grid at new sizes.
  {
    const double small_g[] = {1, 2, 3, 4, 6, 8, 10, 12, 16, 20};
    const double small_d[] = {10e9, 20e9, 50e9};
    std::size_t placed = 0;
    for (std::size_t block = 0; placed < layout.g_small_points; ++block) {
      const double N = log_lerp({layout.N.min, 3 * layout.N.min},
                                double(block % 3) / 2.0) *
                       (1.0 + 0.1 * double(block / 3));
      for (double D : small_d) {
        for (double g : small_g) {
          if (placed == layout.g_small_points) break;
          b.add("gs", small_id,
                {N, D, std::max(layout.Na.min, 0.25 * N),
                 std::clamp(g, layout.G.min, layout.G.max), 0.0},
                tags("g-small", "g", block + 1));
          ++placed;
        }
      }
    }
  }

  // Validation tier: hull corners, then a Latin hypercube.
  {
    const auto val_point = [&](double N, double D, double tna, double tg,
                               double ts) {
      const double na_hi = std::min(N, layout.val_Na.max);
      const double na_lo = std::min(na_hi, layout.val_Na.min);
      const auto [g, s] = expert_layout(tg, ts, layout.G, layout.S);
      return FactorPoint{N, D, log_lerp({na_lo, na_hi}, tna), g, s};
    };
    std::size_t placed = 0;
    for (double N : {layout.val_N.min, layout.val_N.max}) {
      for (double D : {layout.val_D.min, layout.val_D.max}) {
        if (placed == layout.validation_points) break;
        b.add("val", val_id, val_point(N, D, 0.5, 0.3, 0.5),
              tags("validation", "corner", 0));
        ++placed;
      }
    }
    const std::size_t n = layout.validation_points - placed;
    const auto u = lhs(n, 5, rng);
    for (std::size_t i = 0; i < n; ++i) {
      b.add("val", val_id,
            val_point(log_lerp(layout.val_N, u[0][i]),
                      log_lerp(layout.val_D, u[1][i]), u[2][i], u[3][i],
                      u[4][i]),
            tags("validation", "random", 0));
    }
  }

  std::mt19937_64 noise_rng(seed ^ kNoiseStream);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& r : c.records) {
    if (sigma > 0) r.loss += noise(noise_rng);
    r.tags["seed"] = std::to_string(seed);
  }
  c.update_ranges();
  return c;
}

}  // namespace moelaw
