// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference routes for tests. Nothing here calls into the
// library's law or optimizer code.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "moelaw/constants.hpp"
#include "moelaw/factors.hpp"

namespace moelaw::oracle {

/// Joint law evaluated term by term in long double.
inline long double joint_loss(const ScalingConstants& c, const FactorPoint& p) {
  using LD = long double;
  const LD N = p.N, D = p.D, Na = p.Na, G = p.G, S = p.S;
  const LD al = c.alpha;
  const LD structure = LD(c.e) * G + LD(c.f) / G + LD(c.m) * S * S + LD(c.n) * S;
  const LD scale = std::pow(N, -al) + LD(c.k) * std::pow(Na, -al) + LD(c.h) * Na / N;
  return structure * scale + LD(c.a) * std::pow(N, -al) +
         LD(c.b) * std::pow(D, -LD(c.beta)) + LD(c.c) * std::pow(Na, -al) +
         LD(c.eps);
}

/// Fourth-order central difference of f at x with step h.
inline long double central_difference(const std::function<long double(long double)>& f,
                                      long double x, long double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

struct GridMin {
  double arg = 0;
  long double value = 0;
};

/// Smallest f over lo, lo+step, ..., hi.
inline GridMin grid_minimum(const std::function<long double(double)>& f, double lo,
                            double hi, double step) {
  GridMin best{lo, f(lo)};
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 1; i <= n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const long double v = f(x);
    if (v < best.value) best = {x, v};
  }
  return best;
}

/// Interior point: N in [1e8, 1e12], D in [1e9, 1e13], Na/N in [1e-3, 0.99],
/// G in (1, 64], S in (0, 0.95].
inline FactorPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto logu = [&](double lo, double hi) {
    return std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)));
  };
  FactorPoint p;
  p.N = logu(1e8, 1e12);
  p.D = logu(1e9, 1e13);
  p.Na = p.N * logu(1e-3, 0.99);
  p.G = 1.0 + 63.0 * (1.0 - u(rng));
  p.S = 0.95 * (1.0 - u(rng));
  return p;
}

/// Constants with an interior G optimum in [1.5, 30], an S optimum in
/// (0.02, 0.9) and a positive structure term at both optima.
inline ScalingConstants random_constants(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto logu = [&](double lo, double hi) {
    return std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)));
  };
  ScalingConstants c;
  c.e = logu(0.05, 0.5);
  const double g_opt = 1.5 + 28.5 * u(rng);
  c.f = c.e * g_opt * g_opt;
  const double s_opt = 0.02 + 0.88 * u(rng);
  // Structure term at the optimum is 2 e g_opt - m s_opt^2; keep it positive.
  const double m_max = std::min(10.0, 1.8 * c.e * g_opt / (s_opt * s_opt));
  c.m = logu(std::min(1.0, 0.5 * m_max), m_max);
  c.n = -2 * c.m * s_opt;
  c.k = logu(1e-4, 1e-2);
  c.h = logu(0.02, 0.2);
  c.a = logu(10, 60);
  c.alpha = 0.15 + 0.2 * u(rng);
  c.b = logu(1e3, 5e4);
  c.beta = 0.3 + 0.3 * u(rng);
  c.c = logu(10, 60);
  c.eps = 1 + u(rng);
  return c;
}

}  // namespace moelaw::oracle
