// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "moelaw/error.hpp"
#include "moelaw/law.hpp"
#include "moelaw/optimizer.hpp"

namespace moelaw {

double PowerLaw::operator()(double C) const {
  return offset + coeff * std::pow(C, exponent);
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0) || !(hi >= lo)) throw DomainError("log_spaced needs 0 < lo <= hi");
  std::vector<double> out;
  if (n == 0) return out;
  if (n == 1) return {lo};
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::pow(10.0, a + (b - a) * static_cast<double>(i) /
                                         static_cast<double>(n - 1)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_frontier_budgets() {
  return log_spaced(1e18, 1e22, 41);
}

namespace {

// Offset and coefficient for a fixed exponent, plus the residual sum.
struct LinearFit {
  double offset = 0;
  double coeff = 0;
  double sse = 0;
};

LinearFit solve_linear(std::span<const double> C, std::span<const double> L,
                       double exponent) {
  const double n = static_cast<double>(C.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < C.size(); ++i) {
    const double x = std::pow(C[i], exponent);
    sx += x;
    sy += L[i];
    sxx += x * x;
    sxy += x * L[i];
  }
  LinearFit f;
  const double det = n * sxx - sx * sx;
  if (!(std::abs(det) > 0)) {
    f.sse = std::numeric_limits<double>::infinity();
    return f;
  }
  f.coeff = (n * sxy - sx * sy) / det;
  f.offset = (sy - f.coeff * sx) / n;
  for (std::size_t i = 0; i < C.size(); ++i) {
    const double r = f.offset + f.coeff * std::pow(C[i], exponent) - L[i];
    f.sse += r * r;
  }
  return f;
}

}  // namespace

PowerLaw fit_power_law(std::span<const double> C, std::span<const double> L) {
  if (C.size() != L.size() || C.size() < 3) {
    throw DomainError("power-law fit needs >= 3 (C, L) pairs");
  }
  constexpr double kLo = -2.0;
  constexpr double kHi = -1e-3;
  constexpr int kScan = 200;
  const auto sse = [&](double p) { return solve_linear(C, L, p).sse; };

  // Coarse scan, then Brent inside the winning cell.
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double p = kLo + (kHi - kLo) * i / kScan;
    const double s = sse(p);
    if (s < best_sse) {
      best_sse = s;
      best = i;
    }
  }
  const double cell = (kHi - kLo) / kScan;
  const double lo = std::max(kLo, kLo + cell * (best - 1));
  const double hi = std::min(kHi, kLo + cell * (best + 1));
  const auto [p, fp] = boost::math::tools::brent_find_minima(sse, lo, hi, 52);
  (void)fp;
  const LinearFit f = solve_linear(C, L, p);
  return {f.offset, f.coeff, p};
}

Frontier compute_optimal_frontier(const ScalingConstants& c, double N,
                                  double G, double S,
                                  std::span<const double> budgets) {
  if (!(N > 0) || !std::isfinite(N)) throw DomainError("N must be > 0");
  Frontier fr;
  fr.N = N;
  fr.G = G;
  fr.S = S;
  const double A = structure_term(c, G, S);
  fr.structure = A;
  fr.C0 = (A + c.a) * std::pow(N, -c.alpha) + c.eps;
  const double weight = A * c.k + c.c;

  std::vector<double> fit_C, fit_L;
  for (double C : budgets) {
    if (!(C > 0) || !std::isfinite(C)) {
      throw DomainError("compute budget must be > 0");
    }
    FrontierPoint pt;
    pt.C = C;
    const double cb = std::pow(C, c.beta);
    // lhs - rhs of the stationarity condition, as a function of log Na.
    const auto parts = [&](double log_na) {
      const double na = std::exp(log_na);
      const double lhs = c.b * c.beta * std::pow(na, c.beta - 1.0) / cb;
      const double rhs =
          c.alpha * weight * std::pow(na, -c.alpha - 1.0) - A * c.h / N;
      return std::pair{lhs, rhs};
    };
    const auto g = [&](double log_na) {
      const auto [l, r] = parts(log_na);
      return l - r;
    };

    double lo = std::log(1e-6 * N);
    double hi = std::log(N);
    double g_lo = g(lo);
    const double g_hi = g(hi);
    if (!(g_lo * g_hi <= 0)) {
      fr.points.push_back(pt);  // no root in the bracket
      continue;
    }
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double g_mid = g(mid);
      if ((g_mid <= 0) == (g_lo <= 0)) {
        lo = mid;
        g_lo = g_mid;
      } else {
        hi = mid;
      }
    }
    const double log_na = 0.5 * (lo + hi);
    const double na = std::exp(log_na);
    const auto [l, r] = parts(log_na);
    pt.has_root = true;
    pt.Na_star = na;
    pt.D_star = C / na;
    pt.residual = std::abs(l - r) / std::max(std::abs(l), std::abs(r));
    pt.L_star = fr.C0 + weight * (c.alpha + c.beta) / c.beta *
                            std::pow(na, -c.alpha) +
                A * c.h * (c.beta - 1.0) / (N * c.beta) * na;
    fit_C.push_back(C);
    fit_L.push_back(pt.L_star);
    fr.points.push_back(pt);
  }
  if (fit_C.size() >= 3) fr.summary = fit_power_law(fit_C, fit_L);
  return fr;
}

}  // namespace moelaw
