// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "moelaw/factors.hpp"

namespace moelaw::detail {

enum class ParamRole { Weight, Exponent, Free };

/// Weights and exponents must be non-negative; free offsets are unconstrained.
/// Fitting bounds are what keep them strictly positive.
ParamRole role_of(std::string_view name);

void validate_named(std::span<const std::string_view> names,
                    std::span<const double> values, std::string_view what);

double lookup(std::span<const std::string_view> names,
              std::span<const double> values, std::string_view name);

double require_factor(const std::optional<double>& v, Factor f);

}  // namespace moelaw::detail
