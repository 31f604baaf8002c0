// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include "fitter_detail.hpp"

namespace moelaw::detail {

namespace {

constexpr double kLambdaInit = 1e-3;
constexpr double kLambdaMin = 1e-15;
constexpr double kLambdaMax = 1e20;
constexpr double kCostFloor = 1e-30;

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

LmOutcome levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0,
                              const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& hi,
                              const LmSettings& settings) {
  const Eigen::Index p = x0.size();
  LmOutcome out;
  out.x = project(x0, lo, hi);

  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  fn(out.x, r, &J);
  out.cost = finite(r) ? 0.5 * r.squaredNorm()
                       : std::numeric_limits<double>::infinity();
  if (!std::isfinite(out.cost) || !J.allFinite()) return out;

  double lambda = kLambdaInit;
  const Eigen::Index n = r.size();
  Eigen::MatrixXd A(n + p, p);
  Eigen::VectorXd rhs(n + p);
  Eigen::VectorXd r_trial;

  for (out.iterations = 0; out.iterations < settings.max_iterations;) {
    if (out.cost <= kCostFloor) {
      out.converged = true;
      break;
    }
    // Variables on a bound whose descent direction points outward are held
    // for this step so they do not drag the free ones through the projection.
    const Eigen::VectorXd grad = J.transpose() * r;
    A.topRows(n) = J;
    for (Eigen::Index j = 0; j < p; ++j) {
      const bool at_lo = out.x(j) <= lo(j) && grad(j) > 0;
      const bool at_hi = out.x(j) >= hi(j) && grad(j) < 0;
      if (at_lo || at_hi) A.topRows(n).col(j).setZero();
    }
    Eigen::VectorXd diag = A.topRows(n).colwise().squaredNorm().transpose();
    const double dmax = std::max(diag.maxCoeff(), 1e-300);
    diag = diag.cwiseMax(1e-12 * dmax);

    A.bottomRows(p).setZero();
    A.bottomRows(p).diagonal() = (lambda * diag).cwiseSqrt();
    rhs.head(n) = -r;
    rhs.tail(p).setZero();
    const Eigen::VectorXd step = A.colPivHouseholderQr().solve(rhs);

    const Eigen::VectorXd x_trial = project(out.x + step, lo, hi);
    const double moved = (x_trial - out.x).norm();
    if (!finite(x_trial) ||
        moved <= settings.xtol * (out.x.norm() + settings.xtol)) {
      // Projection ate the whole step or it is below resolution.
      if (lambda >= kLambdaMax || moved == 0.0) {
        out.converged = true;
        break;
      }
      lambda *= 10;
      ++out.iterations;
      continue;
    }

    fn(x_trial, r_trial, nullptr);
    const double cost_trial = finite(r_trial)
                                  ? 0.5 * r_trial.squaredNorm()
                                  : std::numeric_limits<double>::infinity();
    ++out.iterations;
    if (cost_trial < out.cost) {
      const double decrease = (out.cost - cost_trial) / out.cost;
      // A small gain under heavy damping says nothing about convergence.
      const bool near_gauss_newton = lambda <= 1.0;
      out.x = x_trial;
      out.cost = cost_trial;
      fn(out.x, r, &J);
      if (!J.allFinite()) break;
      lambda = std::max(lambda / 3, kLambdaMin);
      if (decrease < settings.ftol && near_gauss_newton) {
        out.converged = true;
        break;
      }
    } else {
      lambda *= 4;
      if (lambda > kLambdaMax) {
        // No descent direction left at working precision.
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace moelaw::detail
