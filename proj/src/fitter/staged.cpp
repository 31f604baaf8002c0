// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "moelaw/error.hpp"
#include "moelaw/fitter.hpp"

namespace moelaw {

namespace {

constexpr double kGroupTolerance = 0.01;

bool close(double a, double b) {
  return std::abs(a - b) <=
         kGroupTolerance * std::max(std::abs(a), std::abs(b)) + 1e-12;
}

using Key = std::function<std::vector<double>(const FactorPoint&)>;

// Greedy clustering on the first member of each group.
std::vector<std::vector<ExperimentRecord>> group_by(
    const std::vector<ExperimentRecord>& rs, const Key& key) {
  std::vector<std::vector<double>> reps;
  std::vector<std::vector<ExperimentRecord>> groups;
  for (const auto& r : rs) {
    const auto k = key(r.point);
    std::size_t g = 0;
    for (; g < reps.size(); ++g) {
      bool same = true;
      for (std::size_t i = 0; i < k.size() && same; ++i) {
        same = close(k[i], reps[g][i]);
      }
      if (same) break;
    }
    if (g == reps.size()) {
      reps.push_back(k);
      groups.emplace_back();
    }
    groups[g].push_back(r);
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& x, const auto& y) { return x.size() > y.size(); });
  return groups;
}

std::optional<StageResult> run_stage(
    const std::string& stage, SubLawForm form,
    const std::vector<ExperimentRecord>& rs, const Key& key,
    const FitOptions& options, std::vector<std::string>& warnings) {
  std::string last_error = "no controlled group";
  for (const auto& group : group_by(rs, key)) {
    try {
      StageResult s{stage, group.size(), fit_sub_law(form, group, options)};
      return s;
    } catch (const std::logic_error& e) {
      last_error = e.what();
    }
  }
  warnings.push_back(stage + " stage skipped: " + last_error);
  return std::nullopt;
}

}  // namespace

StagedFit staged_fit_pipeline(std::span<const ExperimentRecord> records,
                              const FitOptions& options) {
  std::vector<ExperimentRecord> rs;
  std::string key, value;
  if (const auto eq = options.holdout_tag.find('='); eq != std::string::npos) {
    key = options.holdout_tag.substr(0, eq);
    value = options.holdout_tag.substr(eq + 1);
  }
  for (const auto& r : records) {
    if (key.empty() || !r.has_tag(key, value)) rs.push_back(r);
  }
  rs = deduplicate(rs);

  FitOptions stage_opts;
  stage_opts.objective = options.objective;
  stage_opts.starts = options.starts;
  stage_opts.max_iterations = options.max_iterations;
  stage_opts.tolerance = options.tolerance;
  stage_opts.seed = options.seed;

  StagedFit out;
  const auto nd = run_stage(
      "ND", SubLawForm::ND, rs,
      [](const FactorPoint& p) { return std::vector{p.G, p.S, p.Na / p.N}; },
      stage_opts, out.warnings);
  const auto na = run_stage(
      "Na", SubLawForm::NaOnly, rs,
      [](const FactorPoint& p) { return std::vector{p.N, p.D, p.G, p.S}; },
      stage_opts, out.warnings);
  const auto g = run_stage(
      "G", SubLawForm::GOnly, rs,
      [](const FactorPoint& p) { return std::vector{p.N, p.D, p.Na, p.S}; },
      stage_opts, out.warnings);
  const auto s = run_stage(
      "S", SubLawForm::SOnly, rs,
      [](const FactorPoint& p) { return std::vector{p.N, p.D, p.Na, p.G}; },
      stage_opts, out.warnings);
  for (const auto* st : {&nd, &na, &g, &s}) {
    if (*st) out.stages.push_back(**st);
  }

  const ScalingConstants ref;
  double alpha = ref.alpha, beta = ref.beta;
  if (nd) {
    alpha = nd->fit.params[1];
    beta = nd->fit.params[3];
  } else if (na) {
    alpha = na->fit.params[1];
  }

  // With the exponents fixed the joint law is linear in the products of the
  // remaining constants.
  const auto n = static_cast<Eigen::Index>(rs.size());
  Eigen::MatrixXd A(n, 16);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = rs[static_cast<std::size_t>(i)].point;
    const double P = std::pow(p.N, -alpha), Q = std::pow(p.Na, -alpha);
    const double R = p.Na / p.N, X = std::pow(p.D, -beta);
    const double st[4] = {p.G, 1 / p.G, p.S * p.S, p.S};
    const double sz[3] = {P, Q, R};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 4; ++b) A(i, 4 * a + b) = st[b] * sz[a];
    }
    A(i, 12) = P;
    A(i, 13) = X;
    A(i, 14) = Q;
    A(i, 15) = 1;
    y[i] = rs[static_cast<std::size_t>(i)].loss;
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(16);
  if (n > 0) {
    const Eigen::VectorXd scale =
        A.colwise().norm().transpose().cwiseMax(1e-300);
    const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
    w = As.colPivHouseholderQr().solve(y).cwiseQuotient(scale);
  }
  const auto ratio = [&](int block) {
    double num = 0, den = 0;
    for (int b = 0; b < 4; ++b) {
      num += w[4 * block + b] * w[b];
      den += w[b] * w[b];
    }
    return den > 0 ? num / den : 0.0;
  };

  const std::array<double, ScalingConstants::kCount> guess{
      w[0], w[1], w[2], w[3], ratio(1), ratio(2),
      w[12], alpha, w[13], beta, w[14], w[15]};
  const auto names = parameter_names(SubLawForm::Joint);
  out.initial.resize(guess.size());
  for (std::size_t j = 0; j < guess.size(); ++j) {
    ParamBounds bnd = default_bounds(SubLawForm::Joint, names[j]);
    if (const auto it = options.bounds.find(std::string(names[j]));
        it != options.bounds.end()) {
      bnd = it->second;
    }
    const double v = std::isfinite(guess[j]) ? guess[j] : ref.to_array()[j];
    out.initial[j] = std::clamp(v, bnd.lo, bnd.hi);
  }

  FitOptions joint_opts = options;
  joint_opts.initial = out.initial;
  out.joint = fit_joint(records, joint_opts);
  out.constants = *out.joint.constants;
  return out;
}

}  // namespace moelaw
