// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

// Batched evaluation of the joint law over many configurations.
//
// Every kernel has a scalar reference in `kernels::scalar` and, where the
// target supports it, an AVX2+FMA (x86-64) or NEON (AArch64) variant. The
// top-level functions dispatch at runtime to the widest variant the CPU
// supports; `set_isa_override` pins a variant for testing.
//
// Inputs are structure-of-arrays with sizes already in log space. Fitting
// evaluates the same records thousands of times with different constants,
// so the logs are computed once by `FactorTable`.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "moelaw/constants.hpp"
#include "moelaw/factors.hpp"

namespace moelaw::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

/// True if the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Widest available variant.
Isa detected_isa();

/// The variant the dispatching entry points use right now. Honors the
/// override, then the MOELAW_KERNEL environment variable, then detection.
Isa active_isa();

/// Pins dispatch to `isa` (must be available) or clears the pin.
void set_isa_override(std::optional<Isa> isa);

struct FactorColumns {
  std::span<const double> log_N;
  std::span<const double> log_D;
  std::span<const double> log_Na;
  std::span<const double> G;
  std::span<const double> S;

  std::size_t size() const { return G.size(); }
};

/// Owning SoA copy of a set of points.
class FactorTable {
 public:
  FactorTable() = default;
  explicit FactorTable(std::span<const FactorPoint> points);

  FactorColumns columns() const {
    return {log_N_, log_D_, log_Na_, G_, S_};
  }
  std::size_t size() const { return G_.size(); }

 private:
  std::vector<double> log_N_, log_D_, log_Na_, G_, S_;
};

/// Output columns for d(loss)/d(constant), indexed by ConstantIndex.
using JacobianColumns = std::array<std::span<double>, ScalingConstants::kCount>;

void joint_loss(const ScalingConstants& c, const FactorColumns& x,
                std::span<double> loss);

/// Loss plus its partials with respect to each of the twelve constants.
void joint_loss_jacobian(const ScalingConstants& c, const FactorColumns& x,
                         std::span<double> loss, const JacobianColumns& jac);

/// exp() over a span with the selected variant; exposed for accuracy tests.
void exp_batch(Isa isa, std::span<const double> x, std::span<double> out);

namespace scalar {
void joint_loss(const ScalingConstants& c, const FactorColumns& x,
                std::span<double> loss);
void joint_loss_jacobian(const ScalingConstants& c, const FactorColumns& x,
                         std::span<double> loss, const JacobianColumns& jac);
void exp_batch(std::span<const double> x, std::span<double> out);
}  // namespace scalar

namespace avx2 {
void joint_loss(const ScalingConstants& c, const FactorColumns& x,
                std::span<double> loss);
void joint_loss_jacobian(const ScalingConstants& c, const FactorColumns& x,
                         std::span<double> loss, const JacobianColumns& jac);
void exp_batch(std::span<const double> x, std::span<double> out);
}  // namespace avx2

namespace neon {
void joint_loss(const ScalingConstants& c, const FactorColumns& x,
                std::span<double> loss);
void joint_loss_jacobian(const ScalingConstants& c, const FactorColumns& x,
                         std::span<double> loss, const JacobianColumns& jac);
void exp_batch(std::span<const double> x, std::span<double> out);
}  // namespace neon

}  // namespace moelaw::kernels
