// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "moelaw/datastore.hpp"
#include "moelaw/json_io.hpp"
#include "moelaw/law.hpp"

namespace moelaw::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "moelaw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("moelaw-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::vector<std::string> with_registry(std::vector<std::string> args) const {
    args.insert(args.begin(), {"--registry", path("registry")});
    return args;
  }

  fs::path dir_;
};

TEST_F(CliTest, PredictHumanAndJson) {
  const Outcome h = invoke({"predict", "--N", "1e9", "--D", "2e10", "--Na", "2e8", "--G", "6.78", "--S", "0.3148"});
  EXPECT_EQ(h.code, kExitOk);
  EXPECT_EQ(h.out, "predicted loss: 2.840645\n");

  const Outcome j = invoke({"--output", "json", "predict", "--N", "1B", "--D", "20B", "--Na", "200M",
                            "--G", "6.78", "--S", "0.3148"});
  ASSERT_EQ(j.code, kExitOk);
  const Json doc = Json::parse(j.out);
  EXPECT_NEAR(doc.at("loss").get<double>(), 2.840645038590035, 1e-12);
  EXPECT_EQ(doc.at("point").at("Na").get<double>(), 2e8);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"predict", "--N", "lots"}).code, kExitUsage);
  EXPECT_EQ(invoke({"optimal", "--what", "H"}).code, kExitUsage);
  EXPECT_EQ(invoke({"--output", "xml", "optimal"}).code, kExitUsage);
  const Outcome o = invoke({"frobnicate"});
  EXPECT_EQ(o.code, kExitUsage);
  EXPECT_NE(o.err.find("usage error"), std::string::npos);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST_F(CliTest, OperationErrors) {
  const Outcome o = invoke({"predict", "--N", "1e9", "--D", "2e10", "--Na", "3e9", "--G", "6", "--S", "0.3"});
  EXPECT_EQ(o.code, kExitOperation);
  EXPECT_NE(o.err.find("error (domain)"), std::string::npos);
  EXPECT_EQ(invoke(with_registry({"--constants", "nope", "optimal"})).code, kExitOperation);
  EXPECT_EQ(invoke({"fit", "--input", path("missing.csv")}).code, kExitOperation);
}

TEST_F(CliTest, OptimalAndRange) {
  EXPECT_EQ(invoke({"optimal", "--what", "G"}).out, "G_opt = 6.778\n");
  const Outcome j = invoke({"--output", "json", "optimal", "--what", "all", "--N", "21e9"});
  ASSERT_EQ(j.code, kExitOk);
  const Json doc = Json::parse(j.out);
  EXPECT_NEAR(doc.at("theoretical_ratio").at("ratio").get<double>(), 0.4292, 1e-4);
  EXPECT_NEAR(doc.at("efficiency_ratio").at("ratio").get<double>(), 0.22, 1e-12);

  const Outcome r = invoke({"range", "--N", "21B", "--Na", "3.6B"});
  EXPECT_EQ(r.out, "G range [5.08, 9.04]\nS range [0.183, 0.447]\n");
}

TEST_F(CliTest, ReportTables) {
  const Outcome t4 = invoke({"report", "--kind", "table4"});
  ASSERT_EQ(t4.code, kExitOk);
  EXPECT_NE(t4.out.find("| Qwen3-30B-A3B | 3B-30B | 40.07% (12.0B) | 21.00% (6.3B) | 9.00% (2.7B) |"),
            std::string::npos)
      << t4.out;
  const Outcome csv = invoke({"--output", "csv", "report", "--kind", "table3", "--model", "X:3.6B:21B"});
  ASSERT_EQ(csv.code, kExitOk);
  EXPECT_NE(csv.out.find("X,"), std::string::npos);
  // A row that cannot be computed marks the run as failed but still prints.
  const Outcome bad = invoke({"report", "--kind", "table4", "--thresholds", "0"});
  EXPECT_EQ(bad.code, kExitOperation);
  EXPECT_NE(bad.out.find("error: "), std::string::npos);
}

TEST_F(CliTest, CurveCsv) {
  const Outcome o = invoke({"--output", "csv", "curve", "--target", "G", "--from", "2", "--to", "4", "--step", "1"});
  ASSERT_EQ(o.code, kExitOk);
  std::istringstream lines(o.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "G,loss");
  int rows = 0;
  while (std::getline(lines, line)) {
    const double G = std::stod(line.substr(0, line.find(',')));
    const double loss = std::stod(line.substr(line.find(',') + 1));
    const FactorPoint p{2.4e9, 5e10, 476e6, G, 0.3148458021208289};
    EXPECT_NEAR(loss, eval_joint_loss(ScalingConstants{}, p), 1e-9);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST_F(CliTest, ArchAndSweep) {
  const std::vector<std::string> spec{"--layers", "20", "--d-hidden", "1280", "--d-head", "64",
                                      "--n-h", "20", "--d-expert", "224", "--n-e", "128",
                                      "--n-k", "16", "--n-s", "4"};
  auto args = spec;
  args.insert(args.begin(), {"--output", "json", "arch", "--u", "2"});
  const Outcome a = invoke(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_NE(a.out.find("\"n_e\": 62"), std::string::npos) << a.out;

  args = spec;
  args.insert(args.begin(), {"--output", "csv", "sweep", "--target", "S", "--levels", "0,0.25"});
  const Outcome s = invoke(args);
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_EQ(s.out.rfind("level,layers,d_hidden,d_head,n_h,d_expert,n_e,n_k,n_s,N,Na,G,S", 0), 0u);

  args = spec;
  args.insert(args.begin(), {"sweep", "--target", "G", "--levels", "3"});
  const Outcome bad = invoke(args);
  EXPECT_EQ(bad.code, kExitOperation);
  EXPECT_NE(bad.err.find("error (integrality)"), std::string::npos);
}

TEST_F(CliTest, CampaignFitSaveRoundTrip) {
  const std::string csv = path("c.csv");
  ASSERT_EQ(invoke({"--seed", "3", "campaign", "--sigma", "0", "--out", csv}).code, kExitOk);
  const auto ingested = ingest_file(csv);
  EXPECT_EQ(ingested.campaign.records.size(), 446u);

  const Outcome f = invoke(with_registry({"--output", "json", "fit", "--input", csv, "--starts", "2",
                                          "--holdout", "tier=validation", "--save", "synthetic-fit"}));
  ASSERT_EQ(f.code, kExitOk) << f.err;
  const Json doc = Json::parse(f.out);
  EXPECT_EQ(doc.at("model"), "joint");
  EXPECT_EQ(doc.at("metrics").at("holdout_records"), 88u);
  EXPECT_LT(doc.at("metrics").at("holdout_max_abs_error").get<double>(), 1e-6);

  const ScalingConstants fitted = constants_from_json(doc.at("constants"));
  const ConstantsRegistry reg(fs::path(path("registry")));
  EXPECT_EQ(reg.load("synthetic-fit").constants, fitted);

  // The saved label and the fit JSON both drive predictions.
  std::ofstream(path("fit.json")) << f.out;
  const std::vector<std::string> point{"predict", "--N", "1e9", "--D", "2e10", "--Na", "2e8", "--G", "6", "--S", "0.3"};
  auto by_label = point;
  by_label.insert(by_label.begin(), {"--constants", "synthetic-fit"});
  auto by_file = point;
  by_file.insert(by_file.begin(), {"--constants", path("fit.json")});
  const Outcome p1 = invoke(with_registry(by_label));
  const Outcome p2 = invoke(with_registry(by_file));
  EXPECT_EQ(p1.code, kExitOk);
  EXPECT_EQ(p1.out, p2.out);
}

TEST_F(CliTest, ConstantsRegistry) {
  const Outcome list = invoke(with_registry({"constants", "list"}));
  EXPECT_EQ(list.out, "paper-table-5\n");
  const Outcome show = invoke(with_registry({"--output", "json", "constants", "show"}));
  ASSERT_EQ(show.code, kExitOk);
  EXPECT_EQ(constants_from_json(Json::parse(show.out).at("constants")), ScalingConstants{});

  Json alt = to_json(ScalingConstants{});
  alt["alpha"] = 0.25;
  std::ofstream(path("alt.json")) << alt.dump();
  EXPECT_EQ(invoke(with_registry({"constants", "save", "--label", "alt", "--from-json", path("alt.json")})).code,
            kExitOk);
  EXPECT_EQ(invoke(with_registry({"constants", "list"})).out, "paper-table-5\nalt\n");
  EXPECT_EQ(invoke(with_registry({"constants", "save", "--label", "paper-table-5"})).code, kExitOperation);

  Json broken = alt;
  broken.erase("beta");
  std::ofstream(path("broken.json")) << broken.dump();
  const Outcome b = invoke({"--constants", path("broken.json"), "optimal"});
  EXPECT_EQ(b.code, kExitOperation);
  EXPECT_NE(b.err.find("beta"), std::string::npos);
}

}  // namespace
}  // namespace moelaw::cli
