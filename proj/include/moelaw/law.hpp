// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "moelaw/constants.hpp"
#include "moelaw/factors.hpp"

namespace moelaw {

// ---------------------------------------------------------------------------
// Joint law
// ---------------------------------------------------------------------------

/// eG + f/G + mS^2 + nS: the expert-structure term. Independent of sizes.
double structure_term(const ScalingConstants& c, double G, double S);

/// N^-alpha + k Na^-alpha + h Na/N: how model size scales the structure term.
double size_scale_term(const ScalingConstants& c, double N, double Na);

/// Predicted loss at `p`. Throws DomainError if `p` violates its invariants.
double eval_joint_loss(const ScalingConstants& c, const FactorPoint& p);

struct FactorGradient {
  double dN = 0;
  double dD = 0;
  double dNa = 0;
  double dG = 0;
  double dS = 0;
};

/// Analytic partials of `eval_joint_loss` with respect to each factor.
/// Requires an interior point (see validate_interior).
FactorGradient eval_joint_gradient(const ScalingConstants& c,
                                   const FactorPoint& p);

// ---------------------------------------------------------------------------
// Marginal laws used while building up the joint form
// ---------------------------------------------------------------------------

enum class SubLawForm { ND, NaOnly, NDNa, GOnly, NDNaG, SOnly, Joint };

std::string_view to_string(SubLawForm form);
SubLawForm parse_sub_law_form(std::string_view name);

/// Parameter names of `form`, in storage order:
///   ND      a alpha b beta eps
///   NaOnly  c gamma h iota            (c/Na^gamma + h Na + iota)
///   NDNa    a alpha b beta c h eps    (a/N^a + b/D^b + c/Na^a + h Na/N + eps)
///   GOnly   e f tau
///   NDNaG   e f k h a alpha b beta c eps
///   SOnly   m n psi
///   Joint   the twelve ScalingConstants
std::span<const std::string_view> parameter_names(SubLawForm form);

/// Factors a form reads.
std::span<const Factor> referenced_factors(SubLawForm form);

struct SubLawParams {
  SubLawForm form = SubLawForm::ND;
  std::vector<double> params;

  /// Throws DomainError when the length does not match the form or a weight
  /// or exponent is negative.
  void validate() const;

  /// Value of a named parameter; throws DomainError for unknown names.
  double get(std::string_view name) const;

  static SubLawParams from_constants(const ScalingConstants& c);
  ScalingConstants to_constants() const;  // Joint form only
};

/// Evaluates the declared marginal form. Unused factors are ignored; a
/// referenced factor that is missing or invalid is a DomainError.
double eval_sub_law(const SubLawParams& params, const FactorInputs& in);

// ---------------------------------------------------------------------------
// Baseline laws from prior work, for comparison fits
// ---------------------------------------------------------------------------

enum class BaselineId {
  /// c + (g/G^gamma + a)/N^alpha + b/D^beta, N = active parameters
  FineGrained,
  /// a/N^alpha + b/D^beta + c/(1-s)^lambda + d/((1-s)^delta N^gamma) + e,
  /// s = fraction of inactive experts
  Sparsity,
};

std::string_view to_string(BaselineId id);
BaselineId parse_baseline_id(std::string_view name);

/// FineGrained: c g gamma a alpha b beta
/// Sparsity:    a alpha b beta c lambda d delta gamma e_offset
std::span<const std::string_view> parameter_names(BaselineId id);

struct BaselineParams {
  BaselineId id = BaselineId::FineGrained;
  std::vector<double> params;

  void validate() const;
  double get(std::string_view name) const;
};

struct BaselineInputs {
  std::optional<double> N;  // active params (FineGrained) or total (Sparsity)
  std::optional<double> D;
  std::optional<double> G;
  std::optional<double> sparsity;  // in [0, 1)
};

/// Maps one of our configurations onto a baseline's inputs. FineGrained
/// reads N <- Na and our G as granularity; Sparsity reads N <- N and
/// approximates the inactive-expert fraction by 1 - Na/N.
BaselineInputs baseline_inputs(BaselineId id, const FactorPoint& p);

/// A term whose weight is exactly zero does not require its input.
double eval_baseline(const BaselineParams& params, const BaselineInputs& in);

}  // namespace moelaw
