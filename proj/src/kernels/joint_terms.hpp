// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

// Shared pieces of the batch kernels: argument checks, the polynomial used
// by every vector exp, and the per-element scalar body that the SIMD
// variants mirror operation for operation.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "moelaw/kernels.hpp"

namespace moelaw::kernels::detail {

inline void check_sizes(const FactorColumns& x, std::size_t out_size) {
  const std::size_t n = x.size();
  if (x.log_N.size() != n || x.log_D.size() != n || x.log_Na.size() != n ||
      x.S.size() != n || out_size != n) {
    throw std::invalid_argument("kernel column sizes disagree");
  }
}

inline void check_sizes(const FactorColumns& x, std::size_t out_size,
                        const JacobianColumns& jac) {
  check_sizes(x, out_size);
  for (const auto& col : jac) {
    if (col.size() != out_size) {
      throw std::invalid_argument("jacobian column size disagrees");
    }
  }
}

// exp(x) = 2^k * exp(r), r = x - k ln2, |r| <= ln2/2. Degree-13 Taylor
// keeps the truncation error under 1e-17 relative on that interval.
inline constexpr double kLog2e = 1.4426950408889634;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kExpClamp = 700.0;
inline constexpr double kExpPoly[14] = {
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
    1.0 / 6227020800.0,
};

struct ElementTerms {
  double loss;
  double structure;  // eG + f/G + mS^2 + nS
  double scale;      // P + kQ + hR
  double P, Q, R, X;
};

inline ElementTerms element_terms(const ScalingConstants& c, double log_N,
                                  double log_D, double log_Na, double G,
                                  double S) {
  ElementTerms t{};
  t.P = std::exp(-c.alpha * log_N);
  t.Q = std::exp(-c.alpha * log_Na);
  t.R = std::exp(log_Na - log_N);
  t.X = std::exp(-c.beta * log_D);
  t.structure = c.e * G + c.f / G + c.m * S * S + c.n * S;
  t.scale = t.P + c.k * t.Q + c.h * t.R;
  t.loss = t.structure * t.scale + c.a * t.P + c.b * t.X + c.c * t.Q + c.eps;
  return t;
}

}  // namespace moelaw::kernels::detail
