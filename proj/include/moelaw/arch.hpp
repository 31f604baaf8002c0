// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "moelaw/factors.hpp"

namespace moelaw {

/// Concrete MoE hyperparameters. Field names follow the JSON keys.
struct ArchitectureSpec {
  std::int64_t layers = 1;
  std::int64_t d_hidden = 1;
  std::int64_t d_head = 1;
  std::int64_t n_h = 1;
  std::int64_t d_expert = 1;
  std::int64_t n_e = 1;  // routed experts
  std::int64_t n_k = 1;  // activated routed experts
  std::int64_t n_s = 0;  // shared experts

  /// Throws DomainError on non-positive dims, n_k > n_e or n_k + n_s < 1.
  void validate() const;

  std::int64_t G() const { return n_k + n_s; }
  double S() const { return static_cast<double>(n_s) / static_cast<double>(G()); }

  bool operator==(const ArchitectureSpec&) const = default;
};

struct ParamCount {
  double N = 0;
  double Na = 0;
  double G = 0;
  double S = 0;
};

/// Attention plus expert FFN weights; embeddings are not counted.
///   Na = (4 d_head n_h + 3 G d_expert) d_hidden l
///   N  = (4 d_head n_h + 3 d_expert (n_s + n_e)) d_hidden l
ParamCount count_params(const ArchitectureSpec& spec);

/// Law inputs for `spec` trained on `D` tokens.
FactorPoint to_factor_point(const ArchitectureSpec& spec, double D);

/// Scales d_expert by `u` and sets n_e so total size stays put:
///   v = ((1 - u) S G + n_e) / (u n_e),  n_e' = round(n_e v).
/// Throws DomainError if v <= 0 or n_e' < n_k.
ArchitectureSpec derive_uv_scaling(const ArchitectureSpec& base, double u);

struct SweepLevel {
  double value = 0;
  ArchitectureSpec spec;
  ParamCount counts;
  /// Largest relative change of a held-fixed factor against the base.
  double drift = 0;
  /// Outside the study ranges (N 133M..3.4B, Na 30M..2.2B, D 10B..50B,
  /// G 1..20, S 0..0.7).
  bool extrapolated = false;
};

struct SweepPlan {
  Factor target = Factor::G;
  ArchitectureSpec base;
  std::vector<SweepLevel> levels;
};

/// Relative drift allowed on held-fixed factors.
inline constexpr double kSweepDriftTolerance = 0.01;

/// Builds one spec per level with the other factors held fixed.
///   G   expert counts scale up and d_expert down by level/G
///   S   n_s and n_k are traded at fixed G; n_e absorbs the change so N is
///       unchanged
///   Na  derive_uv_scaling with u chosen from the target d_expert
///   N   routed experts are added or removed at fixed Na
///   D   spec unchanged
/// Throws IntegralityError naming the level and the constraint it breaks.
SweepPlan plan_sweep(const ArchitectureSpec& base, Factor target,
                     std::span<const double> levels);

/// level,layers,d_hidden,d_head,n_h,d_expert,n_e,n_k,n_s,N,Na,G,S
void write_sweep_csv(const SweepPlan& plan, std::ostream& out);

}  // namespace moelaw
