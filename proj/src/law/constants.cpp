// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>

#include "moelaw/constants.hpp"
#include "moelaw/error.hpp"
#include "moelaw/factors.hpp"

namespace moelaw {

void ScalingConstants::validate() const {
  const auto values = to_array();
  for (std::size_t i = 0; i < kCount; ++i) {
    const std::string name(kNames[i]);
    if (!std::isfinite(values[i])) {
      throw DomainError("constant " + name + " is not finite");
    }
    if (i != kN && !(values[i] > 0.0)) {
      throw DomainError("constant " + name + " must be > 0, got " +
                        std::to_string(values[i]));
    }
  }
}

std::string_view to_string(Factor f) {
  switch (f) {
    case Factor::N: return "N";
    case Factor::D: return "D";
    case Factor::Na: return "Na";
    case Factor::G: return "G";
    case Factor::S: return "S";
  }
  return "?";
}

Factor parse_factor(std::string_view name) {
  if (name == "N") return Factor::N;
  if (name == "D") return Factor::D;
  if (name == "Na") return Factor::Na;
  if (name == "G") return Factor::G;
  if (name == "S") return Factor::S;
  throw DomainError("unknown factor '" + std::string(name) +
                    "' (expected N, D, Na, G or S)");
}

double FactorPoint::get(Factor f) const {
  switch (f) {
    case Factor::N: return N;
    case Factor::D: return D;
    case Factor::Na: return Na;
    case Factor::G: return G;
    case Factor::S: return S;
  }
  return 0.0;
}

void FactorPoint::set(Factor f, double v) {
  switch (f) {
    case Factor::N: N = v; break;
    case Factor::D: D = v; break;
    case Factor::Na: Na = v; break;
    case Factor::G: G = v; break;
    case Factor::S: S = v; break;
  }
}

namespace {

void require(bool ok, const char* what, double value) {
  if (!ok) {
    throw DomainError(std::string(what) + " (got " + std::to_string(value) +
                      ")");
  }
}

}  // namespace

void validate(const FactorPoint& p) {
  require(std::isfinite(p.N) && p.N > 0, "N must be > 0", p.N);
  require(std::isfinite(p.D) && p.D > 0, "D must be > 0", p.D);
  require(std::isfinite(p.Na) && p.Na > 0, "Na must be > 0", p.Na);
  require(p.Na <= p.N, "Na must be <= N", p.Na);
  require(std::isfinite(p.G) && p.G >= 1, "G must be >= 1", p.G);
  require(std::isfinite(p.S) && p.S >= 0 && p.S < 1, "S must be in [0, 1)",
          p.S);
}

void validate_interior(const FactorPoint& p) {
  validate(p);
  require(p.Na < p.N, "Na must be < N for an interior point", p.Na);
  require(p.G > 1, "G must be > 1 for an interior point", p.G);
  require(p.S > 0, "S must be > 0 for an interior point", p.S);
}

}  // namespace moelaw
