// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "moelaw/factors.hpp"

namespace moelaw::detail {

/// A parametric law evaluated over a fixed set of points.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::span<const std::string_view> names() const = 0;
  /// Predictions for every point; `jac` (points x params) is filled when
  /// non-null with partials in the natural parameterization.
  virtual void eval(std::span<const double> params, Eigen::VectorXd& pred,
                    Eigen::MatrixXd* jac) const = 0;
};

/// `model` is a sub-law form name ("ND", ..., "joint") or a baseline name.
std::unique_ptr<Model> make_model(const std::string& model,
                                  std::span<const FactorPoint> points);

// ---------------------------------------------------------------------------
// Bounded Levenberg-Marquardt
// ---------------------------------------------------------------------------

using ResidualFn =
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r,
                       Eigen::MatrixXd* jac)>;

struct LmSettings {
  int max_iterations = 500;
  double ftol = 1e-12;  // relative cost decrease on an accepted step
  double xtol = 1e-14;  // relative step length
};

struct LmOutcome {
  Eigen::VectorXd x;
  double cost = 0;  // 0.5 * |r|^2
  int iterations = 0;
  bool converged = false;
};

/// Minimizes 0.5 |r(x)|^2 with x projected onto [lo, hi] after every step.
/// Uses Marquardt's diagonal scaling and solves each damped step as an
/// augmented least-squares problem.
LmOutcome levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0,
                              const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& hi,
                              const LmSettings& settings);

}  // namespace moelaw::detail
