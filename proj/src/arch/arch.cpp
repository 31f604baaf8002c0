// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>

#include "moelaw/arch.hpp"
#include "moelaw/error.hpp"

namespace moelaw {

namespace {

void require_positive(std::int64_t v, const char* name) {
  if (v <= 0) {
    throw DomainError(std::string(name) + " must be > 0 (got " +
                      std::to_string(v) + ")");
  }
}

}  // namespace

void ArchitectureSpec::validate() const {
  require_positive(layers, "layers");
  require_positive(d_hidden, "d_hidden");
  require_positive(d_head, "d_head");
  require_positive(n_h, "n_h");
  require_positive(d_expert, "d_expert");
  require_positive(n_e, "n_e");
  if (n_k < 0) throw DomainError("n_k must be >= 0");
  if (n_s < 0) throw DomainError("n_s must be >= 0");
  if (n_k > n_e) {
    throw DomainError("n_k must be <= n_e (got n_k=" + std::to_string(n_k) +
                      ", n_e=" + std::to_string(n_e) + ")");
  }
  if (n_k + n_s < 1) throw DomainError("n_k + n_s must be >= 1");
}

ParamCount count_params(const ArchitectureSpec& spec) {
  spec.validate();
  const double attn = 4.0 * static_cast<double>(spec.d_head * spec.n_h);
  const double width =
      static_cast<double>(spec.d_hidden) * static_cast<double>(spec.layers);
  const double de = static_cast<double>(spec.d_expert);
  const double G = static_cast<double>(spec.G());
  ParamCount out;
  out.Na = (attn + 3.0 * G * de) * width;
  out.N = (attn + 3.0 * de * static_cast<double>(spec.n_s + spec.n_e)) * width;
  out.G = G;
  out.S = spec.S();
  return out;
}

FactorPoint to_factor_point(const ArchitectureSpec& spec, double D) {
  const ParamCount pc = count_params(spec);
  FactorPoint p{pc.N, D, pc.Na, pc.G, pc.S};
  validate(p);
  return p;
}

ArchitectureSpec derive_uv_scaling(const ArchitectureSpec& base, double u) {
  base.validate();
  if (!(u > 0) || !std::isfinite(u)) {
    throw DomainError("u must be a positive finite scale");
  }
  const double ne = static_cast<double>(base.n_e);
  const double shared = static_cast<double>(base.n_s);  // S * G
  const double v = ((1.0 - u) * shared + ne) / (u * ne);
  if (!(v > 0)) {
    throw DomainError("u=" + std::to_string(u) +
                      " is too large for this spec (v <= 0)");
  }
  ArchitectureSpec out = base;
  out.d_expert = std::llround(static_cast<double>(base.d_expert) * u);
  out.n_e = std::llround(ne * v);
  if (out.d_expert < 1) throw DomainError("scaled d_expert rounds to 0");
  if (out.n_e < out.n_k) {
    throw DomainError("scaled n_e=" + std::to_string(out.n_e) +
                      " is below n_k=" + std::to_string(out.n_k));
  }
  return out;
}

}  // namespace moelaw
