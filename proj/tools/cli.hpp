// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace moelaw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOperation = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv and runs one subcommand. Payloads go to `out`, diagnostics
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace moelaw::cli
