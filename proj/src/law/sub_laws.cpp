// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "law_detail.hpp"
#include "moelaw/error.hpp"
#include "moelaw/law.hpp"

namespace moelaw {

namespace {

using namespace std::string_view_literals;

constexpr std::array kNdNames{"a"sv, "alpha"sv, "b"sv, "beta"sv, "eps"sv};
constexpr std::array kNaNames{"c"sv, "gamma"sv, "h"sv, "iota"sv};
constexpr std::array kNdNaNames{"a"sv, "alpha"sv, "b"sv,  "beta"sv,
                                "c"sv, "h"sv,     "eps"sv};
constexpr std::array kGNames{"e"sv, "f"sv, "tau"sv};
constexpr std::array kNdNaGNames{"e"sv,    "f"sv, "k"sv,    "h"sv, "a"sv,
                                 "alpha"sv, "b"sv, "beta"sv, "c"sv, "eps"sv};
constexpr std::array kSNames{"m"sv, "n"sv, "psi"sv};
constexpr std::array kJointNames{"e"sv, "f"sv, "m"sv,     "n"sv,
                                 "k"sv, "h"sv, "a"sv,     "alpha"sv,
                                 "b"sv, "beta"sv, "c"sv,  "eps"sv};

constexpr std::array kFactorsND{Factor::N, Factor::D};
constexpr std::array kFactorsNa{Factor::Na};
constexpr std::array kFactorsNDNa{Factor::N, Factor::D, Factor::Na};
constexpr std::array kFactorsG{Factor::G};
constexpr std::array kFactorsNDNaG{Factor::N, Factor::D, Factor::Na,
                                   Factor::G};
constexpr std::array kFactorsS{Factor::S};
constexpr std::array kFactorsAll{Factor::N, Factor::D, Factor::Na, Factor::G,
                                 Factor::S};

}  // namespace

std::string_view to_string(SubLawForm form) {
  switch (form) {
    case SubLawForm::ND: return "ND";
    case SubLawForm::NaOnly: return "Na";
    case SubLawForm::NDNa: return "NDNa";
    case SubLawForm::GOnly: return "G";
    case SubLawForm::NDNaG: return "NDNaG";
    case SubLawForm::SOnly: return "S";
    case SubLawForm::Joint: return "joint";
  }
  return "?";
}

SubLawForm parse_sub_law_form(std::string_view name) {
  for (auto form : {SubLawForm::ND, SubLawForm::NaOnly, SubLawForm::NDNa,
                    SubLawForm::GOnly, SubLawForm::NDNaG, SubLawForm::SOnly,
                    SubLawForm::Joint}) {
    if (name == to_string(form)) return form;
  }
  throw DomainError("unknown law form '" + std::string(name) +
                    "' (expected ND, Na, NDNa, G, NDNaG, S or joint)");
}

std::span<const std::string_view> parameter_names(SubLawForm form) {
  switch (form) {
    case SubLawForm::ND: return kNdNames;
    case SubLawForm::NaOnly: return kNaNames;
    case SubLawForm::NDNa: return kNdNaNames;
    case SubLawForm::GOnly: return kGNames;
    case SubLawForm::NDNaG: return kNdNaGNames;
    case SubLawForm::SOnly: return kSNames;
    case SubLawForm::Joint: return kJointNames;
  }
  return {};
}

std::span<const Factor> referenced_factors(SubLawForm form) {
  switch (form) {
    case SubLawForm::ND: return kFactorsND;
    case SubLawForm::NaOnly: return kFactorsNa;
    case SubLawForm::NDNa: return kFactorsNDNa;
    case SubLawForm::GOnly: return kFactorsG;
    case SubLawForm::NDNaG: return kFactorsNDNaG;
    case SubLawForm::SOnly: return kFactorsS;
    case SubLawForm::Joint: return kFactorsAll;
  }
  return {};
}

namespace detail {

ParamRole role_of(std::string_view name) {
  static constexpr std::array kExponents{"alpha"sv, "beta"sv, "gamma"sv,
                                         "lambda"sv, "delta"sv};
  static constexpr std::array kFree{"n"sv, "eps"sv, "iota"sv, "tau"sv,
                                    "psi"sv, "e_offset"sv};
  if (std::ranges::find(kExponents, name) != kExponents.end()) {
    return ParamRole::Exponent;
  }
  if (std::ranges::find(kFree, name) != kFree.end()) return ParamRole::Free;
  return ParamRole::Weight;
}

void validate_named(std::span<const std::string_view> names,
                    std::span<const double> values, std::string_view what) {
  if (names.size() != values.size()) {
    throw DomainError(std::string(what) + " expects " +
                      std::to_string(names.size()) + " parameters, got " +
                      std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string name(names[i]);
    if (!std::isfinite(values[i])) {
      throw DomainError("parameter " + name + " is not finite");
    }
    switch (role_of(names[i])) {
      case ParamRole::Exponent:
        if (values[i] < 0) {
          throw DomainError("exponent " + name + " must be >= 0");
        }
        break;
      case ParamRole::Weight:
        if (values[i] < 0) {
          throw DomainError("weight " + name + " must be >= 0");
        }
        break;
      case ParamRole::Free:
        break;
    }
  }
}

double lookup(std::span<const std::string_view> names,
              std::span<const double> values, std::string_view name) {
  for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw DomainError("no parameter named '" + std::string(name) + "'");
}

double require_factor(const std::optional<double>& v, Factor f) {
  const auto name = std::string(to_string(f));
  if (!v) throw DomainError("missing factor " + name);
  const double x = *v;
  if (!std::isfinite(x)) throw DomainError(name + " is not finite");
  switch (f) {
    case Factor::N:
    case Factor::D:
    case Factor::Na:
      if (!(x > 0)) throw DomainError(name + " must be > 0");
      break;
    case Factor::G:
      if (!(x >= 1)) throw DomainError("G must be >= 1");
      break;
    case Factor::S:
      if (!(x >= 0 && x < 1)) throw DomainError("S must be in [0, 1)");
      break;
  }
  return x;
}

}  // namespace detail

void SubLawParams::validate() const {
  detail::validate_named(parameter_names(form), params,
                         std::string(to_string(form)) + " law");
}

double SubLawParams::get(std::string_view name) const {
  return detail::lookup(parameter_names(form), params, name);
}

SubLawParams SubLawParams::from_constants(const ScalingConstants& c) {
  const auto v = c.to_array();
  return {SubLawForm::Joint, {v.begin(), v.end()}};
}

ScalingConstants SubLawParams::to_constants() const {
  if (form != SubLawForm::Joint || params.size() != ScalingConstants::kCount) {
    throw DomainError("only joint-form parameters convert to constants");
  }
  return ScalingConstants::from_array(
      std::span<const double, ScalingConstants::kCount>(params.data(),
                                                        params.size()));
}

double eval_sub_law(const SubLawParams& p, const FactorInputs& in) {
  p.validate();
  using detail::require_factor;
  const auto get = [&](std::string_view name) { return p.get(name); };

  switch (p.form) {
    case SubLawForm::ND: {
      const double N = require_factor(in.N, Factor::N);
      const double D = require_factor(in.D, Factor::D);
      return get("a") * std::pow(N, -get("alpha")) +
             get("b") * std::pow(D, -get("beta")) + get("eps");
    }
    case SubLawForm::NaOnly: {
      const double Na = require_factor(in.Na, Factor::Na);
      return get("c") * std::pow(Na, -get("gamma")) + get("h") * Na +
             get("iota");
    }
    case SubLawForm::NDNa: {
      const double N = require_factor(in.N, Factor::N);
      const double D = require_factor(in.D, Factor::D);
      const double Na = require_factor(in.Na, Factor::Na);
      if (Na > N) throw DomainError("Na must be <= N");
      const double alpha = get("alpha");
      return get("a") * std::pow(N, -alpha) +
             get("b") * std::pow(D, -get("beta")) +
             get("c") * std::pow(Na, -alpha) + get("h") * Na / N + get("eps");
    }
    case SubLawForm::GOnly: {
      const double G = require_factor(in.G, Factor::G);
      return get("e") * G + get("f") / G + get("tau");
    }
    case SubLawForm::NDNaG: {
      const double N = require_factor(in.N, Factor::N);
      const double D = require_factor(in.D, Factor::D);
      const double Na = require_factor(in.Na, Factor::Na);
      const double G = require_factor(in.G, Factor::G);
      if (Na > N) throw DomainError("Na must be <= N");
      const double alpha = get("alpha");
      const double n_pow = std::pow(N, -alpha);
      const double na_pow = std::pow(Na, -alpha);
      const double structure = get("e") * G + get("f") / G;
      return structure * (n_pow + get("k") * na_pow + get("h") * Na / N) +
             get("a") * n_pow + get("b") * std::pow(D, -get("beta")) +
             get("c") * na_pow + get("eps");
    }
    case SubLawForm::SOnly: {
      const double S = require_factor(in.S, Factor::S);
      return get("m") * S * S + get("n") * S + get("psi");
    }
    case SubLawForm::Joint: {
      FactorPoint pt{require_factor(in.N, Factor::N),
                     require_factor(in.D, Factor::D),
                     require_factor(in.Na, Factor::Na),
                     require_factor(in.G, Factor::G),
                     require_factor(in.S, Factor::S)};
      return eval_joint_loss(p.to_constants(), pt);
    }
  }
  return 0.0;
}

}  // namespace moelaw
