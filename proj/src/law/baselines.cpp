// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <string>

#include "law_detail.hpp"
#include "moelaw/error.hpp"
#include "moelaw/law.hpp"

namespace moelaw {

namespace {

using namespace std::string_view_literals;

constexpr std::array kFineGrainedNames{"c"sv, "g"sv, "gamma"sv, "a"sv,
                                       "alpha"sv, "b"sv, "beta"sv};
constexpr std::array kSparsityNames{"a"sv,      "alpha"sv, "b"sv, "beta"sv,
                                    "c"sv,      "lambda"sv, "d"sv, "delta"sv,
                                    "gamma"sv,  "e_offset"sv};

double positive_input(const std::optional<double>& v, const char* name) {
  if (!v) throw DomainError(std::string("missing baseline input ") + name);
  if (!std::isfinite(*v) || !(*v > 0)) {
    throw DomainError(std::string(name) + " must be > 0");
  }
  return *v;
}

}  // namespace

std::string_view to_string(BaselineId id) {
  switch (id) {
    case BaselineId::FineGrained: return "fine-grained";
    case BaselineId::Sparsity: return "sparsity";
  }
  return "?";
}

BaselineId parse_baseline_id(std::string_view name) {
  if (name == "fine-grained") return BaselineId::FineGrained;
  if (name == "sparsity") return BaselineId::Sparsity;
  throw DomainError("unknown baseline '" + std::string(name) +
                    "' (expected fine-grained or sparsity)");
}

std::span<const std::string_view> parameter_names(BaselineId id) {
  switch (id) {
    case BaselineId::FineGrained: return kFineGrainedNames;
    case BaselineId::Sparsity: return kSparsityNames;
  }
  return {};
}

void BaselineParams::validate() const {
  detail::validate_named(parameter_names(id), params,
                         std::string(to_string(id)) + " baseline");
}

double BaselineParams::get(std::string_view name) const {
  return detail::lookup(parameter_names(id), params, name);
}

BaselineInputs baseline_inputs(BaselineId id, const FactorPoint& p) {
  validate(p);
  switch (id) {
    case BaselineId::FineGrained:
      return {p.Na, p.D, p.G, std::nullopt};
    case BaselineId::Sparsity:
      return {p.N, p.D, std::nullopt, 1.0 - p.Na / p.N};
  }
  return {};
}

double eval_baseline(const BaselineParams& p, const BaselineInputs& in) {
  p.validate();
  const auto get = [&](std::string_view name) { return p.get(name); };

  switch (p.id) {
    case BaselineId::FineGrained: {
      const double N = positive_input(in.N, "N");
      double loss = get("c");
      double n_weight = get("a");
      if (get("g") != 0.0) {
        const double G = positive_input(in.G, "G");
        n_weight += get("g") * std::pow(G, -get("gamma"));
      }
      loss += n_weight * std::pow(N, -get("alpha"));
      if (get("b") != 0.0) {
        loss += get("b") * std::pow(positive_input(in.D, "D"), -get("beta"));
      }
      return loss;
    }
    case BaselineId::Sparsity: {
      double loss = get("e_offset");
      const bool needs_sparsity = get("c") != 0.0 || get("d") != 0.0;
      double dense = 1.0;
      if (needs_sparsity) {
        if (!in.sparsity) throw DomainError("missing baseline input sparsity");
        const double s = *in.sparsity;
        if (!std::isfinite(s) || s < 0.0 || s >= 1.0) {
          throw DomainError("sparsity must be in [0, 1)");
        }
        dense = 1.0 - s;
      }
      if (get("a") != 0.0) {
        loss += get("a") * std::pow(positive_input(in.N, "N"), -get("alpha"));
      }
      if (get("b") != 0.0) {
        loss += get("b") * std::pow(positive_input(in.D, "D"), -get("beta"));
      }
      if (get("c") != 0.0) loss += get("c") * std::pow(dense, -get("lambda"));
      if (get("d") != 0.0) {
        loss += get("d") * std::pow(dense, -get("delta")) *
                std::pow(positive_input(in.N, "N"), -get("gamma"));
      }
      return loss;
    }
  }
  return 0.0;
}

}  // namespace moelaw
