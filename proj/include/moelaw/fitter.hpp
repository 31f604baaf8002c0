// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

// Multi-start bounded Levenberg-Marquardt fits of the joint law, its
// marginal forms and the baseline laws.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moelaw/constants.hpp"
#include "moelaw/datastore.hpp"
#include "moelaw/law.hpp"

namespace moelaw {

struct Objective {
  enum class Kind { SquaredError, Huber };
  Kind kind = Kind::Huber;
  double delta = 0.01;  // Huber only

  /// Per-residual penalty: r^2/2, or the Huber function.
  double rho(double r) const;
};

struct ParamBounds {
  double lo = 0;
  double hi = 0;
};

struct FitOptions {
  Objective objective;
  int starts = 16;
  int max_iterations = 500;
  double tolerance = 1e-12;  // on relative objective decrease
  std::uint64_t seed = 0;
  /// Overrides of the default bounds, keyed by parameter name.
  std::map<std::string, ParamBounds> bounds;
  /// Start 0 uses the published constants (joint form and the marginal forms
  /// that share its parameters).
  bool include_reference_start = true;
  /// Extra start placed before the random ones, e.g. a staged estimate.
  std::optional<std::vector<double>> initial;
  /// "key=value": matching records are excluded from the fit and scored as
  /// the held-out set.
  std::string holdout_tag;
};

struct FitResult {
  std::string model;  // law form or baseline name
  std::vector<std::string> names;
  std::vector<double> params;
  std::optional<ScalingConstants> constants;  // joint form only
  std::vector<std::string> pinned;  // held fixed: unidentifiable here

  // Fit set, after deduplication.
  std::vector<std::string> record_ids;
  std::vector<double> observed;
  std::vector<double> predicted;
  std::vector<double> residuals;  // predicted - observed
  double mean_abs_error = 0;
  double max_abs_error = 0;
  double objective_value = 0;  // mean rho(residual)

  bool converged = false;
  int best_start = 0;
  int iterations = 0;
  std::vector<double> start_objectives;
  std::vector<std::string> warnings;

  // Held-out set (empty without FitOptions::holdout_tag).
  std::vector<std::string> holdout_ids;
  std::vector<double> holdout_observed;
  std::vector<double> holdout_predicted;
  std::optional<double> holdout_mae;
  std::optional<double> holdout_max_abs_error;
};

/// Default bounds for a parameter of `form`.
ParamBounds default_bounds(SubLawForm form, std::string_view name);
ParamBounds default_bounds(BaselineId id, std::string_view name);

/// Throws InsufficientRecordsError below 2 records per free parameter and
/// DegenerateRecordsError when a factor the form needs never varies.
FitResult fit_sub_law(SubLawForm form,
                      std::span<const ExperimentRecord> records,
                      const FitOptions& options);

/// Joint-form fit. S with no spread pins m and n; G with no spread and
/// factors with fewer than 3 distinct values produce warnings, as does a
/// fitted structure term that is not positive over the record hull.
FitResult fit_joint(std::span<const ExperimentRecord> records,
                    const FitOptions& options);

FitResult fit_baseline(BaselineId id, std::span<const ExperimentRecord> records,
                       const FitOptions& options);

/// Recomputes the objective of `result` on `records` (filtered the same way
/// as during the fit).
double evaluate_objective(const FitResult& result,
                          std::span<const ExperimentRecord> records,
                          const FitOptions& options);

/// Predicted loss of a fitted model at `p`.
double predict(const FitResult& result, const FactorPoint& p);

struct StageResult {
  std::string stage;  // "ND", "Na", "G", "S"
  std::size_t group_size = 0;
  FitResult fit;
};

struct StagedFit {
  std::vector<StageResult> stages;
  std::vector<std::string> warnings;  // skipped stages
  std::vector<double> initial;        // joint start built from the stages
  FitResult joint;
  ScalingConstants constants;
};

/// Fits N-D, Na, G and S marginal laws on controlled subsets (records whose
/// other factors agree within 1%), combines them into a joint start and runs
/// fit_joint with it.
StagedFit staged_fit_pipeline(std::span<const ExperimentRecord> records,
                              const FitOptions& options);

}  // namespace moelaw
