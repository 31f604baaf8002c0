// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "moelaw/error.hpp"
#include "moelaw/json_io.hpp"
#include "moelaw/law.hpp"

namespace moelaw {
namespace {

const ScalingConstants kRef;

TEST(ConstantsJson, RoundTripAndKeyOrder) {
  const Json j = to_json(kRef);
  ASSERT_EQ(j.size(), 12u);
  std::size_t i = 0;
  for (const auto& [key, _] : j.items()) EXPECT_EQ(key, ScalingConstants::kNames[i++]);
  EXPECT_EQ(j.at("epsilon").get<double>(), 1.8182);
  EXPECT_EQ(constants_from_json(j), kRef);
  EXPECT_EQ(constants_from_json(Json::parse(j.dump())), kRef);
}

TEST(ConstantsJson, Rejections) {
  Json j = to_json(kRef);
  j.erase("beta");
  EXPECT_THROW(constants_from_json(j), SchemaError);
  j = to_json(kRef);
  j["zeta"] = 1;
  EXPECT_THROW(constants_from_json(j), SchemaError);
  j = to_json(kRef);
  j["a"] = "38";
  EXPECT_THROW(constants_from_json(j), SchemaError);
  EXPECT_THROW(constants_from_json(Json::array()), SchemaError);
}

TEST(PointJson, RoundTrip) {
  const FactorPoint p{1e9, 2e10, 2e8, 6.78, 0.3148};
  EXPECT_EQ(point_from_json(to_json(p)), p);
  EXPECT_THROW(point_from_json(Json{{"N", 1}}), SchemaError);
}

TEST(ArchJson, RoundTripNeedsIntegers) {
  const ArchitectureSpec s{20, 1280, 64, 20, 224, 128, 16, 4};
  EXPECT_EQ(arch_from_json(to_json(s)), s);
  Json j = to_json(s);
  j["n_e"] = 12.5;
  EXPECT_THROW(arch_from_json(j), SchemaError);
}

TEST(RecordJson, RoundTrip) {
  const ExperimentRecord r{"fit-0001", {1e9, 2e10, 2e8, 6, 0.25}, 2.9, {{"tier", "fit"}}};
  EXPECT_EQ(record_from_json(to_json(r)), r);
  Json j = to_json(r);
  j["tags"] = "tier=fit;sweep=nd";
  EXPECT_EQ(record_from_json(j).tags.at("sweep"), "nd");
  j["tags"] = 3;
  EXPECT_THROW(record_from_json(j), SchemaError);
}

TEST(CampaignJson, Shape) {
  Campaign c;
  c.records.push_back({"a", {1e9, 2e10, 2e8, 6, 0.25}, 2.9, {}});
  c.records.push_back({"b", {2e9, 3e10, 2e8, 8, 0.0}, 2.8, {}});
  c.update_ranges();
  c.provenance.kind = Provenance::Kind::Synthetic;
  c.provenance.sigma = 0.005;
  c.provenance.seed = 9;
  const Json j = to_json(c);
  EXPECT_EQ(j.at("provenance").at("kind"), "synthetic");
  EXPECT_EQ(j.at("provenance").at("seed"), 9u);
  EXPECT_EQ(j.at("ranges").at("N"), Json::parse("[1e9, 2e9]"));
  EXPECT_EQ(j.at("records").size(), 2u);
  EXPECT_EQ(record_from_json(j.at("records")[1]), c.records[1]);
}

TEST(OptimaJson, Fields) {
  const OptimaReport r = make_optima_report(kRef, 21e9, std::nullopt, std::nullopt, 0.001);
  const Json j = to_json(r);
  EXPECT_DOUBLE_EQ(j.at("G_opt").get<double>(), r.G_opt);
  EXPECT_DOUBLE_EQ(j.at("theoretical_ratio").at("ratio").get<double>(), r.theoretical.ratio);
  EXPECT_EQ(j.at("efficiency_ratio").at("converged"), true);
  EXPECT_EQ(j.at("S_clamped"), false);
}

TEST(IntervalJson, Fields) {
  const Json j = to_json(Interval{1.0, 2.5, true, false});
  EXPECT_EQ(j.at("lo"), 1.0);
  EXPECT_EQ(j.at("hi"), 2.5);
  EXPECT_EQ(j.at("clipped_lo"), true);
}

TEST(FrontierJson, RootlessPointsOmitSolution) {
  const std::vector<double> budgets{1e6, 1e20};
  const Json j = to_json(compute_optimal_frontier(kRef, 1e12, 7, 0.31, budgets));
  EXPECT_FALSE(j.at("points")[0].contains("Na_star"));
  EXPECT_TRUE(j.at("points")[1].contains("L_star"));
  EXPECT_TRUE(j.at("summary").is_null());
}

TEST(FitResultJson, RoundTripPredicts) {
  FitResult r;
  r.model = "joint";
  for (auto n : ScalingConstants::kNames) r.names.emplace_back(n);
  const auto arr = kRef.to_array();
  r.params.assign(arr.begin(), arr.end());
  r.constants = kRef;
  const FitResult back = fit_result_from_json(Json::parse(to_json(r).dump()));
  EXPECT_EQ(back.model, "joint");
  EXPECT_EQ(back.names, r.names);
  EXPECT_EQ(back.params, r.params);
  ASSERT_TRUE(back.constants);
  EXPECT_EQ(*back.constants, kRef);
  const FactorPoint p{1e9, 2e10, 2e8, 6.78, 0.3148};
  EXPECT_EQ(predict(back, p), eval_joint_loss(kRef, p));
  EXPECT_THROW(fit_result_from_json(Json{{"model", "joint"}}), SchemaError);
}

TEST(FitResultJson, HoldoutMetricsOnlyWhenPresent) {
  FitResult r;
  r.model = "ND";
  EXPECT_FALSE(to_json(r).at("metrics").contains("holdout_mean_abs_error"));
  r.holdout_mae = 0.003;
  r.holdout_max_abs_error = 0.01;
  EXPECT_EQ(to_json(r).at("metrics").at("holdout_mean_abs_error"), 0.003);
}

}  // namespace
}  // namespace moelaw
