// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

// NEON variant, two doubles per lane group. AArch64 only.

#include <algorithm>
#include <stdexcept>

#include "joint_terms.hpp"

#if defined(MOELAW_HAVE_NEON_TU) && defined(__aarch64__)
#include <arm_neon.h>
#define MOELAW_NEON_ENABLED 1
#endif

namespace moelaw::kernels::neon {

#if defined(MOELAW_NEON_ENABLED)

namespace {

constexpr std::size_t kWidth = 2;

inline float64x2_t splat(double v) { return vdupq_n_f64(v); }

inline float64x2_t exp_pd(float64x2_t x) {
  using namespace detail;
  x = vmaxq_f64(splat(-kExpClamp), vminq_f64(splat(kExpClamp), x));
  const float64x2_t k = vrndnq_f64(vmulq_f64(x, splat(kLog2e)));
  float64x2_t r = vfmsq_f64(x, k, splat(kLn2Hi));
  r = vfmsq_f64(r, k, splat(kLn2Lo));

  float64x2_t p = splat(kExpPoly[13]);
  for (int i = 12; i >= 0; --i) {
    p = vfmaq_f64(splat(kExpPoly[i]), p, r);
  }

  int64x2_t bits = vaddq_s64(vcvtq_s64_f64(k), vdupq_n_s64(1023));
  bits = vshlq_n_s64(bits, 52);
  return vmulq_f64(p, vreinterpretq_f64_s64(bits));
}

struct Lanes {
  float64x2_t log_N, log_D, log_Na, G, S;
};

struct LaneTerms {
  float64x2_t loss, structure, scale, P, Q, R, X;
};

inline LaneTerms lane_terms(const ScalingConstants& c, const Lanes& in) {
  LaneTerms t;
  t.P = exp_pd(vmulq_f64(splat(-c.alpha), in.log_N));
  t.Q = exp_pd(vmulq_f64(splat(-c.alpha), in.log_Na));
  t.R = exp_pd(vsubq_f64(in.log_Na, in.log_N));
  t.X = exp_pd(vmulq_f64(splat(-c.beta), in.log_D));

  float64x2_t structure = vmulq_f64(splat(c.e), in.G);
  structure = vaddq_f64(structure, vdivq_f64(splat(c.f), in.G));
  structure = vaddq_f64(structure,
                        vmulq_f64(splat(c.m), vmulq_f64(in.S, in.S)));
  structure = vaddq_f64(structure, vmulq_f64(splat(c.n), in.S));
  t.structure = structure;

  float64x2_t scale = vaddq_f64(t.P, vmulq_f64(splat(c.k), t.Q));
  t.scale = vaddq_f64(scale, vmulq_f64(splat(c.h), t.R));

  float64x2_t loss = vmulq_f64(structure, t.scale);
  loss = vaddq_f64(loss, vmulq_f64(splat(c.a), t.P));
  loss = vaddq_f64(loss, vmulq_f64(splat(c.b), t.X));
  loss = vaddq_f64(loss, vmulq_f64(splat(c.c), t.Q));
  t.loss = vaddq_f64(loss, splat(c.eps));
  return t;
}

inline Lanes load(const FactorColumns& x, std::size_t i, std::size_t count) {
  double buf[5][kWidth] = {{0, 0}, {0, 0}, {0, 0}, {1, 1}, {0, 0}};
  for (std::size_t j = 0; j < count; ++j) {
    buf[0][j] = x.log_N[i + j];
    buf[1][j] = x.log_D[i + j];
    buf[2][j] = x.log_Na[i + j];
    buf[3][j] = x.G[i + j];
    buf[4][j] = x.S[i + j];
  }
  return {vld1q_f64(buf[0]), vld1q_f64(buf[1]), vld1q_f64(buf[2]),
          vld1q_f64(buf[3]), vld1q_f64(buf[4])};
}

inline void store(std::span<double> out, std::size_t i, std::size_t count,
                  float64x2_t v) {
  double buf[kWidth];
  vst1q_f64(buf, v);
  for (std::size_t j = 0; j < count; ++j) out[i + j] = buf[j];
}

}  // namespace

void joint_loss(const ScalingConstants& c, const FactorColumns& x,
                std::span<double> loss) {
  detail::check_sizes(x, loss.size());
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; i += kWidth) {
    const std::size_t count = std::min(kWidth, n - i);
    store(loss, i, count, lane_terms(c, load(x, i, count)).loss);
  }
}

void joint_loss_jacobian(const ScalingConstants& c, const FactorColumns& x,
                         std::span<double> loss, const JacobianColumns& jac) {
  detail::check_sizes(x, loss.size(), jac);
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; i += kWidth) {
    const std::size_t count = std::min(kWidth, n - i);
    const Lanes in = load(x, i, count);
    const LaneTerms t = lane_terms(c, in);
    store(loss, i, count, t.loss);
    store(jac[kE], i, count, vmulq_f64(in.G, t.scale));
    store(jac[kF], i, count, vdivq_f64(t.scale, in.G));
    store(jac[kM], i, count, vmulq_f64(vmulq_f64(in.S, in.S), t.scale));
    store(jac[kN], i, count, vmulq_f64(in.S, t.scale));
    store(jac[kK], i, count, vmulq_f64(t.structure, t.Q));
    store(jac[kH], i, count, vmulq_f64(t.structure, t.R));
    store(jac[kA], i, count, t.P);
    const float64x2_t n_part = vmulq_f64(vmulq_f64(in.log_N, t.P),
                                         vaddq_f64(t.structure, splat(c.a)));
    const float64x2_t na_part =
        vmulq_f64(vmulq_f64(in.log_Na, t.Q),
                  vaddq_f64(vmulq_f64(t.structure, splat(c.k)), splat(c.c)));
    store(jac[kAlpha], i, count, vnegq_f64(vaddq_f64(n_part, na_part)));
    store(jac[kB], i, count, t.X);
    store(jac[kBeta], i, count,
          vmulq_f64(vmulq_f64(splat(-c.b), in.log_D), t.X));
    store(jac[kC], i, count, t.Q);
    store(jac[kEps], i, count, splat(1.0));
  }
}

void exp_batch(std::span<const double> x, std::span<double> out) {
  const std::size_t n = std::min(x.size(), out.size());
  for (std::size_t i = 0; i < n; i += kWidth) {
    const std::size_t count = std::min(kWidth, n - i);
    double buf[kWidth] = {0, 0};
    for (std::size_t j = 0; j < count; ++j) buf[j] = x[i + j];
    store(out, i, count, exp_pd(vld1q_f64(buf)));
  }
}

#else

namespace {
[[noreturn]] void unavailable() {
  throw std::logic_error("NEON kernels were not compiled for this target");
}
}  // namespace

void joint_loss(const ScalingConstants&, const FactorColumns&,
                std::span<double>) {
  unavailable();
}
void joint_loss_jacobian(const ScalingConstants&, const FactorColumns&,
                         std::span<double>, const JacobianColumns&) {
  unavailable();
}
void exp_batch(std::span<const double>, std::span<double>) { unavailable(); }

#endif

}  // namespace moelaw::kernels::neon
