// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

// AVX2 + FMA variant, four doubles per lane group. Compiled with -mavx2 -mfma
// on x86-64 only; the dispatcher checks CPU support before calling in.

#include <algorithm>
#include <stdexcept>

#include "joint_terms.hpp"

#if defined(MOELAW_HAVE_AVX2_TU) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define MOELAW_AVX2_ENABLED 1
#endif

namespace moelaw::kernels::avx2 {

#if defined(MOELAW_AVX2_ENABLED)

namespace {

constexpr std::size_t kWidth = 4;

inline __m256d exp_pd(__m256d x) {
  using namespace detail;
  x = _mm256_max_pd(_mm256_set1_pd(-kExpClamp),
                    _mm256_min_pd(_mm256_set1_pd(kExpClamp), x));
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT |
                                        _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kLn2Hi), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kLn2Lo), r);

  __m256d p = _mm256_set1_pd(kExpPoly[13]);
  for (int i = 12; i >= 0; --i) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kExpPoly[i]));
  }

  // 2^k through the exponent field.
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)),
                           52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

struct Lanes {
  __m256d log_N, log_D, log_Na, G, S;
};

struct LaneTerms {
  __m256d loss, structure, scale, P, Q, R, X;
};

inline LaneTerms lane_terms(const ScalingConstants& c, const Lanes& in) {
  const __m256d alpha = _mm256_set1_pd(-c.alpha);
  LaneTerms t;
  t.P = exp_pd(_mm256_mul_pd(alpha, in.log_N));
  t.Q = exp_pd(_mm256_mul_pd(alpha, in.log_Na));
  t.R = exp_pd(_mm256_sub_pd(in.log_Na, in.log_N));
  t.X = exp_pd(_mm256_mul_pd(_mm256_set1_pd(-c.beta), in.log_D));

  __m256d structure = _mm256_mul_pd(_mm256_set1_pd(c.e), in.G);
  structure = _mm256_add_pd(structure,
                            _mm256_div_pd(_mm256_set1_pd(c.f), in.G));
  const __m256d s2 = _mm256_mul_pd(in.S, in.S);
  structure = _mm256_add_pd(structure, _mm256_mul_pd(_mm256_set1_pd(c.m), s2));
  structure = _mm256_add_pd(structure,
                            _mm256_mul_pd(_mm256_set1_pd(c.n), in.S));
  t.structure = structure;

  __m256d scale = _mm256_add_pd(t.P, _mm256_mul_pd(_mm256_set1_pd(c.k), t.Q));
  scale = _mm256_add_pd(scale, _mm256_mul_pd(_mm256_set1_pd(c.h), t.R));
  t.scale = scale;

  __m256d loss = _mm256_mul_pd(structure, scale);
  loss = _mm256_add_pd(loss, _mm256_mul_pd(_mm256_set1_pd(c.a), t.P));
  loss = _mm256_add_pd(loss, _mm256_mul_pd(_mm256_set1_pd(c.b), t.X));
  loss = _mm256_add_pd(loss, _mm256_mul_pd(_mm256_set1_pd(c.c), t.Q));
  t.loss = _mm256_add_pd(loss, _mm256_set1_pd(c.eps));
  return t;
}

// Loads lanes [i, i+count) and pads the rest with a harmless point.
inline Lanes load(const FactorColumns& x, std::size_t i, std::size_t count) {
  if (count == kWidth) {
    return {_mm256_loadu_pd(&x.log_N[i]), _mm256_loadu_pd(&x.log_D[i]),
            _mm256_loadu_pd(&x.log_Na[i]), _mm256_loadu_pd(&x.G[i]),
            _mm256_loadu_pd(&x.S[i])};
  }
  alignas(32) double buf[5][kWidth] = {{0, 0, 0, 0}, {0, 0, 0, 0},
                                       {0, 0, 0, 0}, {1, 1, 1, 1},
                                       {0, 0, 0, 0}};
  for (std::size_t j = 0; j < count; ++j) {
    buf[0][j] = x.log_N[i + j];
    buf[1][j] = x.log_D[i + j];
    buf[2][j] = x.log_Na[i + j];
    buf[3][j] = x.G[i + j];
    buf[4][j] = x.S[i + j];
  }
  return {_mm256_load_pd(buf[0]), _mm256_load_pd(buf[1]),
          _mm256_load_pd(buf[2]), _mm256_load_pd(buf[3]),
          _mm256_load_pd(buf[4])};
}

inline void store(std::span<double> out, std::size_t i, std::size_t count,
                  __m256d v) {
  if (count == kWidth) {
    _mm256_storeu_pd(&out[i], v);
    return;
  }
  alignas(32) double buf[kWidth];
  _mm256_store_pd(buf, v);
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
    store(jac[kE], i, count, _mm256_mul_pd(in.G, t.scale));
    store(jac[kF], i, count, _mm256_div_pd(t.scale, in.G));
    store(jac[kM], i, count,
          _mm256_mul_pd(_mm256_mul_pd(in.S, in.S), t.scale));
    store(jac[kN], i, count, _mm256_mul_pd(in.S, t.scale));
    store(jac[kK], i, count, _mm256_mul_pd(t.structure, t.Q));
    store(jac[kH], i, count, _mm256_mul_pd(t.structure, t.R));
    store(jac[kA], i, count, t.P);

    const __m256d n_part = _mm256_mul_pd(
        _mm256_mul_pd(in.log_N, t.P),
        _mm256_add_pd(t.structure, _mm256_set1_pd(c.a)));
    const __m256d na_part = _mm256_mul_pd(
        _mm256_mul_pd(in.log_Na, t.Q),
        _mm256_add_pd(_mm256_mul_pd(t.structure, _mm256_set1_pd(c.k)),
                      _mm256_set1_pd(c.c)));
    store(jac[kAlpha], i, count,
          _mm256_sub_pd(_mm256_setzero_pd(), _mm256_add_pd(n_part, na_part)));

    store(jac[kB], i, count, t.X);
    store(jac[kBeta], i, count,
          _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(-c.b), in.log_D), t.X));
    store(jac[kC], i, count, t.Q);
    store(jac[kEps], i, count, _mm256_set1_pd(1.0));
  }
}

void exp_batch(std::span<const double> x, std::span<double> out) {
  const std::size_t n = std::min(x.size(), out.size());
  for (std::size_t i = 0; i < n; i += kWidth) {
    const std::size_t count = std::min(kWidth, n - i);
    alignas(32) double buf[kWidth] = {0, 0, 0, 0};
    for (std::size_t j = 0; j < count; ++j) buf[j] = x[i + j];
    store(out, i, count, exp_pd(_mm256_load_pd(buf)));
  }
}

#else

namespace {
[[noreturn]] void unavailable() {
  throw std::logic_error("AVX2 kernels were not compiled for this target");
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

}  // namespace moelaw::kernels::avx2
