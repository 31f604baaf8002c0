// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

// Optimal configurations derived from a constant set.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "moelaw/constants.hpp"

namespace moelaw {

/// sqrt(f/e). Throws DomainError unless e, f > 0.
double optimal_G(const ScalingConstants& c);

struct OptimalS {
  double value = 0;  // clamped into [0, 1)
  double vertex = 0;  // -n/(2m), unclamped
  bool clamped = false;
};

/// Vertex of the S parabola. Throws DomainError unless m > 0.
OptimalS optimal_S(const ScalingConstants& c);

struct RatioEstimate {
  double ratio = 0;
  bool extrapolated = false;  // ratio > 1: outside the law's valid domain
};

/// Na/N minimizing loss at fixed N, G, S:
///   (alpha (k A + c) / (h N^alpha A))^(1/(alpha+1)),  A = structure term.
/// Throws DomainError if A <= 0 or N <= 0.
RatioEstimate theoretical_ratio(const ScalingConstants& c, double N, double G,
                                double S);

struct EfficiencyRatio {
  double ratio = 0;
  double Na = 0;
  bool converged = false;
  int steps = 0;  // comparisons made
};

inline constexpr double kDefaultTokens = 1e11;

/// Walks Na over 0.01N, 0.02N, ... and returns the first point whose loss
/// gain over its predecessor is below `threshold`. The step gain does not
/// depend on D. `max_steps` counts grid points, so the default stops at
/// Na = N; when exhausted, `converged` is false and the last point is
/// returned.
EfficiencyRatio efficiency_aware_ratio(const ScalingConstants& c, double N,
                                       double G, double S, double threshold,
                                       int max_steps = 100,
                                       double D = kDefaultTokens);

struct Interval {
  double lo = 0;
  double hi = 0;
  bool clipped_lo = false;
  bool clipped_hi = false;
};

/// G interval whose loss stays within `threshold` of the G optimum. The
/// endpoints solve eG + f/G = 2 sqrt(ef) + threshold/B with
/// B = N^-alpha + k Na^-alpha + h Na/N. lo is clipped at G = 1.
Interval practical_range_G(const ScalingConstants& c, double N, double Na,
                           double threshold);

/// S_opt -/+ sqrt(threshold / (B m)), clipped to [0, 1).
Interval practical_range_S(const ScalingConstants& c, double N, double Na,
                           double threshold);

struct FrontierPoint {
  double C = 0;       // D * Na
  double Na_star = 0;
  double D_star = 0;
  double L_star = 0;
  bool has_root = false;
  double residual = 0;  // relative stationarity residual at Na_star
};

/// offset + coeff * C^exponent
struct PowerLaw {
  double offset = 0;
  double coeff = 0;
  double exponent = 0;

  double operator()(double C) const;
};

struct Frontier {
  double N = 0, G = 0, S = 0;
  double structure = 0;  // eG + f/G + mS^2 + nS
  double C0 = 0;         // (structure + a)/N^alpha + eps
  std::vector<FrontierPoint> points;
  std::optional<PowerLaw> summary;  // needs >= 3 points with a root
};

/// n values spaced evenly in log between lo and hi, endpoints included.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// 41 budgets from 1e18 to 1e22.
std::vector<double> default_frontier_budgets();

/// For each budget, bisects (in log Na over [1e-6 N, N]) the stationarity
/// condition of L along D = C/Na
///   b beta Na^(beta-1) / C^beta = alpha (A k + c) Na^(-alpha-1) - A h / N
/// and evaluates
///   L* = C0 + (A k + c)(alpha + beta)/beta Na*^-alpha
///           + A h (beta - 1)/(N beta) Na*.
/// Budgets without a sign change are flagged and skipped by the summary fit.
Frontier compute_optimal_frontier(const ScalingConstants& c, double N,
                                  double G, double S,
                                  std::span<const double> budgets);

/// Least-squares offset + coeff * C^exponent over (C, L) pairs. Exponent is
/// searched in [-2, -1e-3]; offset and coeff are solved exactly per exponent.
PowerLaw fit_power_law(std::span<const double> C, std::span<const double> L);

struct OptimaReport {
  double N = 0, G = 0, S = 0;
  double G_opt = 0;
  OptimalS S_opt;
  double structure = 0;
  RatioEstimate theoretical;
  double threshold = 0;
  EfficiencyRatio efficiency;
};

/// Everything above at one (N, G, S). Unset G/S default to the optima.
OptimaReport make_optima_report(const ScalingConstants& c, double N,
                                std::optional<double> G,
                                std::optional<double> S, double threshold);

}  // namespace moelaw
