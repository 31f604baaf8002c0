// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

// Reference kernels. Every SIMD variant is tested against these.

#include <cmath>

#include "joint_terms.hpp"

namespace moelaw::kernels::scalar {

void joint_loss(const ScalingConstants& c, const FactorColumns& x,
                std::span<double> loss) {
  detail::check_sizes(x, loss.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    loss[i] = detail::element_terms(c, x.log_N[i], x.log_D[i], x.log_Na[i],
                                    x.G[i], x.S[i])
                  .loss;
  }
}

void joint_loss_jacobian(const ScalingConstants& c, const FactorColumns& x,
                         std::span<double> loss, const JacobianColumns& jac) {
  detail::check_sizes(x, loss.size(), jac);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double G = x.G[i];
    const double S = x.S[i];
    const auto t = detail::element_terms(c, x.log_N[i], x.log_D[i],
                                         x.log_Na[i], G, S);
    loss[i] = t.loss;
    jac[kE][i] = G * t.scale;
    jac[kF][i] = t.scale / G;
    jac[kM][i] = S * S * t.scale;
    jac[kN][i] = S * t.scale;
    jac[kK][i] = t.structure * t.Q;
    jac[kH][i] = t.structure * t.R;
    jac[kA][i] = t.P;
    jac[kAlpha][i] = -(x.log_N[i] * t.P * (t.structure + c.a) +
                       x.log_Na[i] * t.Q * (t.structure * c.k + c.c));
    jac[kB][i] = t.X;
    jac[kBeta][i] = -x.log_D[i] * c.b * t.X;
    jac[kC][i] = t.Q;
    jac[kEps][i] = 1.0;
  }
}

void exp_batch(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size() && i < out.size(); ++i) {
    out[i] = std::exp(x[i]);
  }
}

}  // namespace moelaw::kernels::scalar
