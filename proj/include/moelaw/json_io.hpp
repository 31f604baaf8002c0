// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

// JSON forms of the public value types. Keys match the struct fields;
// constants use the twelve names e f m n k h a alpha b beta c epsilon.

#pragma once

#include "json.hpp"
#include "moelaw/arch.hpp"
#include "moelaw/constants.hpp"
#include "moelaw/datastore.hpp"
#include "moelaw/fitter.hpp"
#include "moelaw/optimizer.hpp"

namespace moelaw {

using Json = nlohmann::ordered_json;

Json to_json(const ScalingConstants& c);
/// Exactly the twelve keys, all numbers. Throws SchemaError.
ScalingConstants constants_from_json(const Json& j);

Json to_json(const FactorPoint& p);
FactorPoint point_from_json(const Json& j);

Json to_json(const ArchitectureSpec& s);
ArchitectureSpec arch_from_json(const Json& j);

Json to_json(const ParamCount& pc);
Json to_json(const SweepPlan& plan);

Json to_json(const ExperimentRecord& r);
ExperimentRecord record_from_json(const Json& j);

Json to_json(const Campaign& c);

Json to_json(const Interval& i);
Json to_json(const OptimaReport& r);
Json to_json(const Frontier& f);

Json to_json(const FitResult& r);
/// Reads back the model, names and parameters written by to_json.
FitResult fit_result_from_json(const Json& j);
Json to_json(const StagedFit& s);

}  // namespace moelaw
