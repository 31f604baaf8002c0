// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "moelaw/error.hpp"
#include "moelaw/law.hpp"
#include "moelaw/optimizer.hpp"

namespace moelaw {

namespace {

void require_size(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

void require_threshold(double t) {
  if (!(t >= 0) || std::isnan(t)) {
    throw DomainError("threshold must be >= 0");
  }
}

double bracket_B(const ScalingConstants& c, double N, double Na) {
  require_size(N, "N");
  require_size(Na, "Na");
  if (Na > N) throw DomainError("Na must be <= N");
  const double B = size_scale_term(c, N, Na);
  if (!(B > 0)) throw DomainError("size bracket B must be > 0");
  return B;
}

}  // namespace

double optimal_G(const ScalingConstants& c) {
  if (!(c.e > 0) || !(c.f > 0)) throw DomainError("optimal_G needs e, f > 0");
  return std::sqrt(c.f / c.e);
}

OptimalS optimal_S(const ScalingConstants& c) {
  if (!(c.m > 0)) throw DomainError("optimal_S needs m > 0");
  OptimalS out;
  out.vertex = -c.n / (2.0 * c.m);
  out.value = out.vertex;
  if (out.vertex < 0) {
    out.value = 0;
    out.clamped = true;
  } else if (out.vertex >= 1) {
    out.value = std::nextafter(1.0, 0.0);
    out.clamped = true;
  }
  return out;
}

RatioEstimate theoretical_ratio(const ScalingConstants& c, double N, double G,
                                double S) {
  require_size(N, "N");
  const double A = structure_term(c, G, S);
  if (!(A > 0)) {
    throw DomainError("structure term eG + f/G + mS^2 + nS must be > 0 (got " +
                      std::to_string(A) + ")");
  }
  const double base =
      c.alpha * (c.k * A + c.c) / (c.h * std::pow(N, c.alpha) * A);
  RatioEstimate out;
  out.ratio = std::pow(base, 1.0 / (c.alpha + 1.0));
  out.extrapolated = out.ratio > 1.0;
  return out;
}

EfficiencyRatio efficiency_aware_ratio(const ScalingConstants& c, double N,
                                       double G, double S, double threshold,
                                       int max_steps, double D) {
  require_size(N, "N");
  require_size(D, "D");
  if (!(threshold > 0)) throw DomainError("threshold must be > 0");
  if (max_steps < 2) throw DomainError("max_steps must be >= 2");

  const double step = 0.01 * N;
  double na_prev = step;
  double loss_prev = eval_joint_loss(c, {N, D, na_prev, G, S});
  EfficiencyRatio out;
  for (int i = 2; i <= max_steps; ++i) {
    const double na_cur = std::min(na_prev + step, N);
    const double loss_cur = eval_joint_loss(c, {N, D, na_cur, G, S});
    ++out.steps;
    out.Na = na_cur;
    if (loss_prev - loss_cur < threshold) {
      out.converged = true;
      break;
    }
    na_prev = na_cur;
    loss_prev = loss_cur;
  }
  out.ratio = out.Na / N;
  return out;
}

Interval practical_range_G(const ScalingConstants& c, double N, double Na,
                           double threshold) {
  require_threshold(threshold);
  if (!(c.e > 0) || !(c.f > 0)) throw DomainError("range needs e, f > 0");
  const double B = bracket_B(c, N, Na);
  const double t = threshold / B;
  const double root_ef = std::sqrt(c.e * c.f);
  // Roots of e G^2 - (2 sqrt(ef) + t) G + f; the discriminant is written so
  // it does not cancel for small t.
  const double disc = t * (4.0 * root_ef + t);
  const double q = 0.5 * (2.0 * root_ef + t + std::sqrt(disc));
  Interval out;
  out.hi = q / c.e;
  out.lo = c.f / q;
  if (out.lo < 1.0) {
    out.lo = 1.0;
    out.clipped_lo = true;
  }
  return out;
}

Interval practical_range_S(const ScalingConstants& c, double N, double Na,
                           double threshold) {
  require_threshold(threshold);
  const OptimalS s = optimal_S(c);
  const double B = bracket_B(c, N, Na);
  const double half = std::sqrt(threshold / (B * c.m));
  Interval out{s.vertex - half, s.vertex + half};
  if (out.lo < 0) {
    out.lo = 0;
    out.clipped_lo = true;
  }
  if (out.hi >= 1) {
    out.hi = std::nextafter(1.0, 0.0);
    out.clipped_hi = true;
  }
  return out;
}

OptimaReport make_optima_report(const ScalingConstants& c, double N,
                                std::optional<double> G,
                                std::optional<double> S, double threshold) {
  OptimaReport r;
  r.N = N;
  r.G_opt = optimal_G(c);
  r.S_opt = optimal_S(c);
  r.G = G.value_or(r.G_opt);
  r.S = S.value_or(r.S_opt.value);
  r.structure = structure_term(c, r.G, r.S);
  r.theoretical = theoretical_ratio(c, N, r.G, r.S);
  r.threshold = threshold;
  r.efficiency = efficiency_aware_ratio(c, N, r.G, r.S, threshold);
  return r;
}

}  // namespace moelaw
