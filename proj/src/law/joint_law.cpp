// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <cassert>
#include <cmath>

#include "moelaw/law.hpp"

namespace moelaw {

double structure_term(const ScalingConstants& c, double G, double S) {
  return c.e * G + c.f / G + c.m * S * S + c.n * S;
}

double size_scale_term(const ScalingConstants& c, double N, double Na) {
  return std::pow(N, -c.alpha) + c.k * std::pow(Na, -c.alpha) + c.h * Na / N;
}

double eval_joint_loss(const ScalingConstants& c, const FactorPoint& p) {
  validate(p);
  const double structure = structure_term(c, p.G, p.S);
  const double n_pow = std::pow(p.N, -c.alpha);
  const double na_pow = std::pow(p.Na, -c.alpha);
  const double scale = n_pow + c.k * na_pow + c.h * p.Na / p.N;
  const double loss = structure * scale + c.a * n_pow +
                      c.b * std::pow(p.D, -c.beta) + c.c * na_pow + c.eps;
  // Non-negative constants and a positive structure term keep every added
  // term non-negative, so the loss cannot drop below the floor.
  assert(!(structure >= 0 && c.a >= 0 && c.b >= 0 && c.c >= 0 && c.k >= 0 &&
           c.h >= 0) ||
         loss >= c.eps);
  return loss;
}

FactorGradient eval_joint_gradient(const ScalingConstants& c,
                                   const FactorPoint& p) {
  validate_interior(p);
  const double structure = structure_term(c, p.G, p.S);
  const double n_pow = std::pow(p.N, -c.alpha);
  const double na_pow = std::pow(p.Na, -c.alpha);
  const double scale = n_pow + c.k * na_pow + c.h * p.Na / p.N;

  FactorGradient g;
  g.dN = -c.alpha * (structure + c.a) * n_pow / p.N -
         structure * c.h * p.Na / (p.N * p.N);
  g.dD = -c.beta * c.b * std::pow(p.D, -c.beta) / p.D;
  g.dNa = structure * (c.h / p.N - c.alpha * c.k * na_pow / p.Na) -
          c.alpha * c.c * na_pow / p.Na;
  g.dG = (c.e - c.f / (p.G * p.G)) * scale;
  g.dS = (2.0 * c.m * p.S + c.n) * scale;
  return g;
}

}  // namespace moelaw
