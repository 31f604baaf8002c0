// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace moelaw {

/// The twelve constants of the joint MoE law
///
///   L = (eG + f/G + mS^2 + nS) * (N^-alpha + k Na^-alpha + h Na/N)
///       + a N^-alpha + b D^-beta + c Na^-alpha + eps
///
/// Default-constructed values are the published fit. Everything except `n`
/// is expected to be strictly positive; `validate()` enforces that, but the
/// evaluators themselves accept any finite values (zeroed constants are a
/// useful degenerate case).
struct ScalingConstants {
  double e = 0.1577;
  double f = 7.2446;
  double m = 5.1395;
  double n = -3.2363;
  double k = 0.0013;
  double h = 0.0450;
  double a = 38.0510;
  double alpha = 0.2383;
  double b = 27129.0488;
  double beta = 0.4694;
  double c = 31.0958;
  double eps = 1.8182;

  static constexpr std::size_t kCount = 12;

  /// Serialized key names, in `to_array()` order.
  static constexpr std::array<std::string_view, kCount> kNames{
      "e", "f", "m", "n", "k", "h", "a", "alpha", "b", "beta", "c", "epsilon"};

  std::array<double, kCount> to_array() const {
    return {e, f, m, n, k, h, a, alpha, b, beta, c, eps};
  }

  static ScalingConstants from_array(std::span<const double, kCount> v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5],
            v[6], v[7], v[8], v[9], v[10], v[11]};
  }

  /// Throws DomainError naming the first constant that is non-finite or,
  /// for all but `n`, not strictly positive.
  void validate() const;

  bool operator==(const ScalingConstants&) const = default;
};

/// Index of each constant inside `to_array()`; used for Jacobian columns.
enum ConstantIndex : std::size_t {
  kE = 0, kF, kM, kN, kK, kH, kA, kAlpha, kB, kBeta, kC, kEps
};

}  // namespace moelaw
