// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <functional>

#include "fitter_detail.hpp"
#include "moelaw/error.hpp"
#include "moelaw/kernels.hpp"
#include "moelaw/law.hpp"

namespace moelaw::detail {

namespace {

// value(params, point, grad-or-null)
using PointFn =
    std::function<double(const double*, const FactorPoint&, double*)>;

class PointwiseModel final : public Model {
 public:
  PointwiseModel(std::span<const std::string_view> names,
                 std::span<const FactorPoint> points, PointFn fn)
      : names_(names), points_(points.begin(), points.end()),
        fn_(std::move(fn)) {}

  std::span<const std::string_view> names() const override { return names_; }

  void eval(std::span<const double> params, Eigen::VectorXd& pred,
            Eigen::MatrixXd* jac) const override {
    const auto n = static_cast<Eigen::Index>(points_.size());
    const auto p = static_cast<Eigen::Index>(names_.size());
    pred.resize(n);
    if (jac) jac->resize(n, p);
    std::vector<double> grad(names_.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      pred[i] = fn_(params.data(), points_[static_cast<std::size_t>(i)],
                    jac ? grad.data() : nullptr);
      if (jac) {
        for (Eigen::Index j = 0; j < p; ++j) {
          (*jac)(i, j) = grad[static_cast<std::size_t>(j)];
        }
      }
    }
  }

 private:
  std::span<const std::string_view> names_;
  std::vector<FactorPoint> points_;
  PointFn fn_;
};

// Batched through the SIMD kernels.
class JointModel final : public Model {
 public:
  explicit JointModel(std::span<const FactorPoint> points) : table_(points) {}

  std::span<const std::string_view> names() const override {
    return parameter_names(SubLawForm::Joint);
  }

  void eval(std::span<const double> params, Eigen::VectorXd& pred,
            Eigen::MatrixXd* jac) const override {
    const auto n = static_cast<Eigen::Index>(table_.size());
    const auto c = ScalingConstants::from_array(
        std::span<const double, ScalingConstants::kCount>(params.data(),
                                                          params.size()));
    pred.resize(n);
    std::span<double> out(pred.data(), table_.size());
    if (!jac) {
      kernels::joint_loss(c, table_.columns(), out);
      return;
    }
    jac->resize(n, ScalingConstants::kCount);
    kernels::JacobianColumns cols;
    for (std::size_t j = 0; j < ScalingConstants::kCount; ++j) {
      cols[j] = std::span<double>(jac->col(static_cast<Eigen::Index>(j)).data(),
                                  table_.size());
    }
    kernels::joint_loss_jacobian(c, table_.columns(), out, cols);
  }

 private:
  kernels::FactorTable table_;
};

double fn_nd(const double* p, const FactorPoint& x, double* g) {
  const double lnN = std::log(x.N), lnD = std::log(x.D);
  const double P = std::exp(-p[1] * lnN), X = std::exp(-p[3] * lnD);
  if (g) {
    g[0] = P;
    g[1] = -p[0] * lnN * P;
    g[2] = X;
    g[3] = -p[2] * lnD * X;
    g[4] = 1;
  }
  return p[0] * P + p[2] * X + p[4];
}

double fn_na(const double* p, const FactorPoint& x, double* g) {
  const double lnNa = std::log(x.Na);
  const double Q = std::exp(-p[1] * lnNa);
  if (g) {
    g[0] = Q;
    g[1] = -p[0] * lnNa * Q;
    g[2] = x.Na;
    g[3] = 1;
  }
  return p[0] * Q + p[2] * x.Na + p[3];
}

double fn_ndna(const double* p, const FactorPoint& x, double* g) {
  // a alpha b beta c h eps
  const double lnN = std::log(x.N), lnD = std::log(x.D), lnNa = std::log(x.Na);
  const double P = std::exp(-p[1] * lnN), Q = std::exp(-p[1] * lnNa);
  const double X = std::exp(-p[3] * lnD), R = x.Na / x.N;
  if (g) {
    g[0] = P;
    g[1] = -(p[0] * lnN * P + p[4] * lnNa * Q);
    g[2] = X;
    g[3] = -p[2] * lnD * X;
    g[4] = Q;
    g[5] = R;
    g[6] = 1;
  }
  return p[0] * P + p[2] * X + p[4] * Q + p[5] * R + p[6];
}

double fn_g(const double* p, const FactorPoint& x, double* g) {
  if (g) {
    g[0] = x.G;
    g[1] = 1 / x.G;
    g[2] = 1;
  }
  return p[0] * x.G + p[1] / x.G + p[2];
}

double fn_ndnag(const double* p, const FactorPoint& x, double* g) {
  // e f k h a alpha b beta c eps
  const double lnN = std::log(x.N), lnD = std::log(x.D), lnNa = std::log(x.Na);
  const double P = std::exp(-p[5] * lnN), Q = std::exp(-p[5] * lnNa);
  const double X = std::exp(-p[7] * lnD), R = x.Na / x.N;
  const double A = p[0] * x.G + p[1] / x.G;
  const double B = P + p[2] * Q + p[3] * R;
  if (g) {
    g[0] = x.G * B;
    g[1] = B / x.G;
    g[2] = A * Q;
    g[3] = A * R;
    g[4] = P;
    g[5] = -(lnN * P * (A + p[4]) + lnNa * Q * (A * p[2] + p[8]));
    g[6] = X;
    g[7] = -p[6] * lnD * X;
    g[8] = Q;
    g[9] = 1;
  }
  return A * B + p[4] * P + p[6] * X + p[8] * Q + p[9];
}

double fn_s(const double* p, const FactorPoint& x, double* g) {
  if (g) {
    g[0] = x.S * x.S;
    g[1] = x.S;
    g[2] = 1;
  }
  return p[0] * x.S * x.S + p[1] * x.S + p[2];
}

double fn_fine_grained(const double* p, const FactorPoint& x, double* g) {
  // c g gamma a alpha b beta, with N <- Na
  const double lnN = std::log(x.Na), lnD = std::log(x.D), lnG = std::log(x.G);
  const double P = std::exp(-p[4] * lnN), X = std::exp(-p[6] * lnD);
  const double Gp = std::exp(-p[2] * lnG);
  const double w = p[1] * Gp + p[3];
  if (g) {
    g[0] = 1;
    g[1] = Gp * P;
    g[2] = -p[1] * lnG * Gp * P;
    g[3] = P;
    g[4] = -w * lnN * P;
    g[5] = X;
    g[6] = -p[5] * lnD * X;
  }
  return p[0] + w * P + p[5] * X;
}

double fn_sparsity(const double* p, const FactorPoint& x, double* g) {
  // a alpha b beta c lambda d delta gamma e_offset; dense = 1 - s = Na/N
  const double lnN = std::log(x.N), lnD = std::log(x.D);
  const double lnw = std::log(x.Na / x.N);
  const double P = std::exp(-p[1] * lnN), X = std::exp(-p[3] * lnD);
  const double W = std::exp(-p[5] * lnw);
  const double Wd = std::exp(-p[7] * lnw), Ng = std::exp(-p[8] * lnN);
  if (g) {
    g[0] = P;
    g[1] = -p[0] * lnN * P;
    g[2] = X;
    g[3] = -p[2] * lnD * X;
    g[4] = W;
    g[5] = -p[4] * lnw * W;
    g[6] = Wd * Ng;
    g[7] = -p[6] * lnw * Wd * Ng;
    g[8] = -p[6] * lnN * Wd * Ng;
    g[9] = 1;
  }
  return p[0] * P + p[2] * X + p[4] * W + p[6] * Wd * Ng + p[9];
}

}  // namespace

std::unique_ptr<Model> make_model(const std::string& model,
                                  std::span<const FactorPoint> points) {
  if (model == to_string(BaselineId::FineGrained)) {
    return std::make_unique<PointwiseModel>(
        parameter_names(BaselineId::FineGrained), points, fn_fine_grained);
  }
  if (model == to_string(BaselineId::Sparsity)) {
    return std::make_unique<PointwiseModel>(
        parameter_names(BaselineId::Sparsity), points, fn_sparsity);
  }
  const SubLawForm form = parse_sub_law_form(model);
  PointFn fn;
  switch (form) {
    case SubLawForm::Joint: return std::make_unique<JointModel>(points);
    case SubLawForm::ND: fn = fn_nd; break;
    case SubLawForm::NaOnly: fn = fn_na; break;
    case SubLawForm::NDNa: fn = fn_ndna; break;
    case SubLawForm::GOnly: fn = fn_g; break;
    case SubLawForm::NDNaG: fn = fn_ndnag; break;
    case SubLawForm::SOnly: fn = fn_s; break;
  }
  return std::make_unique<PointwiseModel>(parameter_names(form), points,
                                          std::move(fn));
}

}  // namespace moelaw::detail
