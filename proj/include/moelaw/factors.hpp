// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>

namespace moelaw {

enum class Factor { N, D, Na, G, S };

std::string_view to_string(Factor f);
/// Accepts "N", "D", "Na", "G", "S" (case-sensitive). Throws DomainError.
Factor parse_factor(std::string_view name);

/// One configuration at which the law is evaluated. Sizes are raw counts
/// (parameters / tokens), never millions or billions.
struct FactorPoint {
  double N = 0;   // total parameters
  double D = 0;   // training tokens
  double Na = 0;  // activated parameters
  double G = 1;   // activated experts, continuous
  double S = 0;   // shared-expert ratio

  double get(Factor f) const;
  void set(Factor f, double v);

  bool operator==(const FactorPoint&) const = default;
};

/// N > 0, D > 0, 0 < Na <= N, G >= 1, 0 <= S < 1, all finite.
void validate(const FactorPoint& p);

/// Strict-inequality version used where derivatives are taken.
void validate_interior(const FactorPoint& p);

/// Subset of factors; marginal laws only read what they reference.
struct FactorInputs {
  std::optional<double> N, D, Na, G, S;

  FactorInputs() = default;
  FactorInputs(const FactorPoint& p)  // NOLINT: implicit on purpose
      : N(p.N), D(p.D), Na(p.Na), G(p.G), S(p.S) {}
};

}  // namespace moelaw
