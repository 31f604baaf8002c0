// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "moelaw/kernels.hpp"

namespace moelaw::kernels {

namespace {

// -1 means no override; otherwise an Isa value.
std::atomic<int> g_override{-1};

bool cpu_has_avx2() {
#if defined(MOELAW_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
  static const bool ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

bool cpu_has_neon() {
#if defined(MOELAW_HAVE_NEON_TU) && defined(__aarch64__)
  return true;  // Advanced SIMD is mandatory on AArch64.
#else
  return false;
#endif
}

std::optional<Isa> env_isa() {
  const char* v = std::getenv("MOELAW_KERNEL");
  if (v == nullptr || *v == '\0') return std::nullopt;
  const std::string s(v);
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (s == to_string(isa) && isa_available(isa)) return isa;
  }
  return std::nullopt;  // unknown or unavailable: fall back to detection
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
    case Isa::Neon: return cpu_has_neon();
  }
  return false;
}

Isa detected_isa() {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() {
  const int o = g_override.load(std::memory_order_relaxed);
  if (o >= 0) return static_cast<Isa>(o);
  static const Isa from_env = env_isa().value_or(detected_isa());
  return from_env;
}

void set_isa_override(std::optional<Isa> isa) {
  if (isa && !isa_available(*isa)) {
    throw std::invalid_argument("kernel variant '" +
                                std::string(to_string(*isa)) +
                                "' is not available on this machine");
  }
  g_override.store(isa ? static_cast<int>(*isa) : -1,
                   std::memory_order_relaxed);
}

FactorTable::FactorTable(std::span<const FactorPoint> points) {
  const std::size_t n = points.size();
  log_N_.reserve(n);
  log_D_.reserve(n);
  log_Na_.reserve(n);
  G_.reserve(n);
  S_.reserve(n);
  for (const auto& p : points) {
    log_N_.push_back(std::log(p.N));
    log_D_.push_back(std::log(p.D));
    log_Na_.push_back(std::log(p.Na));
    G_.push_back(p.G);
    S_.push_back(p.S);
  }
}

void joint_loss(const ScalingConstants& c, const FactorColumns& x,
                std::span<double> loss) {
  switch (active_isa()) {
    case Isa::Avx2: return avx2::joint_loss(c, x, loss);
    case Isa::Neon: return neon::joint_loss(c, x, loss);
    case Isa::Scalar: break;
  }
  scalar::joint_loss(c, x, loss);
}

void joint_loss_jacobian(const ScalingConstants& c, const FactorColumns& x,
                         std::span<double> loss, const JacobianColumns& jac) {
  switch (active_isa()) {
    case Isa::Avx2: return avx2::joint_loss_jacobian(c, x, loss, jac);
    case Isa::Neon: return neon::joint_loss_jacobian(c, x, loss, jac);
    case Isa::Scalar: break;
  }
  scalar::joint_loss_jacobian(c, x, loss, jac);
}

void exp_batch(Isa isa, std::span<const double> x, std::span<double> out) {
  switch (isa) {
    case Isa::Avx2: return avx2::exp_batch(x, out);
    case Isa::Neon: return neon::exp_batch(x, out);
    case Isa::Scalar: break;
  }
  scalar::exp_batch(x, out);
}

}  // namespace moelaw::kernels
