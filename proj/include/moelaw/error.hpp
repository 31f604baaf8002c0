// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace moelaw {

/// A precondition on a law input (factor, constant, threshold) was violated.
/// The message names the violated condition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Records cannot identify the requested law: a needed factor has no spread.
class DegenerateRecordsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fewer records than twice the number of free parameters.
class InsufficientRecordsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input file is missing a required column/key or is malformed.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownLabelError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A sweep level cannot be realized with integer expert counts/dimensions.
class IntegralityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace moelaw
