/*
 * Copyright 2026 The ope-shrink Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.h"
#include "json.hpp"
#include "ope/io.h"
#include "ope/learning.h"
#include "ope/policy_kit.h"
#include "ope/simulation.h"

namespace ope {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ope_cli_" + std::string(::testing::UnitTest::GetInstance()
                                         ->current_test_info()
                                         ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  std::string WriteConfig(const std::string& name, const json& config) const {
    std::ofstream(Path(name)) << config.dump(2);
    return Path(name);
  }

  int Run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::RunCli(args, out_, err_);
  }

  static std::string Read(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::map<std::string, std::string> Snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      files[entry.path().filename().string()] = Read(entry.path());
    }
    return files;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

json EvaluateConfig() {
  return {{"schema_version", 1},
          {"seed", 5},
          {"roster", {"IPS", "snIPS", "DM", "DR", "SWITCH", "DRs-direct",
                      "DRs-oracle"}},
          {"datasets",
           {{{"id", "syn"},
             {"synthetic",
              {{"num_rows", 300}, {"num_actions", 3}, {"feature_dim", 4}}}}}},
          {"conditions",
           {{"loggings", {"pi1(0.5,0.2)", "uniform"}},
            {"n", {100}},
            {"replicates", 4}}}};
}

json SlateConfig() {
  return {{"schema_version", 1},
          {"seed", 2},
          {"relevance",
           {{"synthetic",
             {{"num_queries", 80}, {"docs_per_query", 8}, {"feature_dim", 6}}}}},
          {"slate_length", 2},
          {"num_items", 5},
          {"scorer_fraction", 0.25},
          {"sample_sizes", {100}},
          {"replicates", 3}};
}

json LearnConfig() {
  return {{"schema_version", 1},
          {"seed", 3},
          {"replicates", 1},
          {"gammas", {1e-3}},
          {"lambdas", {0.0, 1.0}},
          {"max_iterations", 50},
          {"dataset",
           {{"id", "syn"},
            {"synthetic",
             {{"num_rows", 400}, {"num_actions", 3}, {"feature_dim", 3}}}}}};
}

TEST_F(CliTest, EvaluateWritesItsTables) {
  const std::string config = WriteConfig("eval.json", EvaluateConfig());
  ASSERT_EQ(Run({"evaluate", "--config", config, "--out", Path("out")}),
            cli::kExitOk)
      << err_.str();
  const auto files = Snapshot(dir_ / "out");
  for (const char* name :
       {"conditions.csv", "results.csv", "ttest.csv", "cdf.csv",
        "selection_c0.csv", "selection_c1.csv"}) {
    EXPECT_EQ(files.count(name), 1u) << name;
  }
  EXPECT_EQ(files.at("results.csv").rfind(
                "condition_id,estimator,mse,clipped_mse,bias_est,var_est\n", 0),
            0u);
  EXPECT_EQ(files.at("selection_c0.csv").rfind(
                "spec_id,predictor,shrink_kind,lambda,bias_ub,var_hat,"
                "objective,chosen\n",
                0),
            0u);
  EXPECT_NE(files.at("conditions.csv").find("c1,syn,pi1(0.9,0),uniform"),
            std::string::npos);
}

TEST_F(CliTest, EvaluateIsByteIdenticalAcrossThreadCounts) {
  const std::string config = WriteConfig("eval.json", EvaluateConfig());
  ASSERT_EQ(Run({"evaluate", "--config", config, "--out", Path("a"),
                 "--threads", "1"}),
            cli::kExitOk);
  ASSERT_EQ(Run({"evaluate", "--config", config, "--out", Path("b"),
                 "--threads", "3"}),
            cli::kExitOk);
  EXPECT_EQ(Snapshot(dir_ / "a"), Snapshot(dir_ / "b"));
  ASSERT_EQ(Run({"evaluate", "--config", config, "--out", Path("c"),
                 "--seed", "6"}),
            cli::kExitOk);
  EXPECT_NE(Snapshot(dir_ / "a").at("results.csv"),
            Snapshot(dir_ / "c").at("results.csv"));
}

TEST_F(CliTest, EvaluateConfigErrors) {
  json unknown = EvaluateConfig();
  unknown["roster"] = {"DR", "MAGIC"};
  EXPECT_EQ(Run({"evaluate", "--config", WriteConfig("u.json", unknown),
                 "--out", Path("out")}),
            cli::kExitConfig);
  EXPECT_NE(err_.str().find("roster"), std::string::npos);

  json one_rep = EvaluateConfig();
  one_rep["conditions"]["replicates"] = 1;
  EXPECT_EQ(Run({"evaluate", "--config", WriteConfig("r.json", one_rep),
                 "--out", Path("out")}),
            cli::kExitConfig);
  EXPECT_NE(err_.str().find("replicates"), std::string::npos) << err_.str();

  json typo = EvaluateConfig();
  typo["sead"] = 1;
  EXPECT_EQ(Run({"evaluate", "--config", WriteConfig("t.json", typo),
                 "--out", Path("out")}),
            cli::kExitConfig);
  EXPECT_NE(err_.str().find("sead"), std::string::npos) << err_.str();

  json version = EvaluateConfig();
  version["schema_version"] = 2;
  EXPECT_EQ(Run({"evaluate", "--config", WriteConfig("v.json", version),
                 "--out", Path("out")}),
            cli::kExitConfig);
  EXPECT_NE(err_.str().find("schema_version"), std::string::npos) << err_.str();

  std::ofstream(Path("broken.json")) << "{";
  EXPECT_EQ(Run({"evaluate", "--config", Path("broken.json")}),
            cli::kExitConfig);
  EXPECT_EQ(Run({"evaluate", "--config", Path("nope.json")}), cli::kExitConfig);
  EXPECT_EQ(Run({"frobnicate"}), cli::kExitConfig);
}

TEST_F(CliTest, EvaluateReadsCsvDatasets) {
  const FullInfoDataset data = MakeSyntheticDataset(
      {.num_rows = 200, .num_actions = 3, .feature_dim = 2, .seed = 1});
  SaveDataset(data, Path("d.csv"), Path("d.json"));
  json config = EvaluateConfig();
  config["datasets"] = {{{"id", "csv"}, {"csv", Path("d.csv")},
                         {"sidecar", Path("d.json")}}};
  EXPECT_EQ(Run({"evaluate", "--config", WriteConfig("e.json", config),
                 "--out", Path("out")}),
            cli::kExitOk)
      << err_.str();

  std::ofstream(Path("bad.csv")) << "label,f0,f1\n0,x,1\n";
  config["datasets"] = {{{"id", "csv"}, {"csv", Path("bad.csv")},
                         {"sidecar", Path("d.json")}}};
  EXPECT_EQ(Run({"evaluate", "--config", WriteConfig("b.json", config),
                 "--out", Path("out2")}),
            cli::kExitData);
}

TEST_F(CliTest, SlateReportsBasisSizeAndIsDeterministic) {
  json config = SlateConfig();
  config["slate_length"] = 5;
  config["num_items"] = 20;
  config["relevance"]["synthetic"]["docs_per_query"] = 25;
  config["sample_sizes"] = {60};
  config["replicates"] = 2;
  const std::string path = WriteConfig("s.json", config);
  ASSERT_EQ(Run({"slate", "--config", path, "--out", Path("a")}), cli::kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("basis size: 96"), std::string::npos);
  ASSERT_EQ(Run({"slate", "--config", path, "--out", Path("b"), "--threads",
                 "3"}),
            cli::kExitOk);
  EXPECT_EQ(Snapshot(dir_ / "a"), Snapshot(dir_ / "b"));
  EXPECT_EQ(Read(dir_ / "a" / "slate_mse.csv").rfind(
                "reward_mode,predictor,n,estimator,mse\n", 0),
            0u);
}

TEST_F(CliTest, SlateRejectsBadShapes) {
  json too_long = SlateConfig();
  too_long["slate_length"] = 6;
  EXPECT_EQ(Run({"slate", "--config", WriteConfig("l.json", too_long),
                 "--out", Path("out")}),
            cli::kExitConfig);
  EXPECT_NE(err_.str().find("slate_length"), std::string::npos);
  json full = SlateConfig();
  full["slate_length"] = 5;
  EXPECT_EQ(Run({"slate", "--config", WriteConfig("f.json", full), "--out",
                 Path("out")}),
            cli::kExitConfig);
  EXPECT_NE(err_.str().find("slate_length"), std::string::npos) << err_.str();
}

TEST_F(CliTest, SlateLogsOutsideTheBasisAreDataErrors) {
  json config = SlateConfig();
  config["write_logs"] = true;
  ASSERT_EQ(Run({"slate", "--config", WriteConfig("w.json", config), "--out",
                 Path("a")}),
            cli::kExitOk)
      << err_.str();
  const std::string logs = Read(dir_ / "a" / "slate_logs.csv");
  const size_t first_row = logs.find('\n') + 1;
  const std::string query = logs.substr(first_row, logs.find(',', first_row) - first_row);

  json ingest = SlateConfig();
  ingest["logs"] = (dir_ / "a" / "slate_logs.csv").string();
  ASSERT_EQ(Run({"slate", "--config", WriteConfig("i.json", ingest), "--out",
                 Path("b")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "b" / "slate_logged.csv"));

  std::ofstream(Path("bad_logs.csv"))
      << "query_id,epsilon,basis_index,reward,propensity\n"
      << query << ",0.5,12,1,0.1\n";
  ingest["logs"] = Path("bad_logs.csv");
  EXPECT_EQ(Run({"slate", "--config", WriteConfig("j.json", ingest), "--out",
                 Path("c")}),
            cli::kExitData);
}

TEST_F(CliTest, LearnWritesAReloadablePolicy) {
  const std::string path = WriteConfig("learn.json", LearnConfig());
  ASSERT_EQ(Run({"learn", "--config", path, "--out", Path("a")}), cli::kExitOk)
      << err_.str();
  const json policy = json::parse(Read(dir_ / "a" / "learned_policy.json"));
  ASSERT_TRUE(policy.contains("scorer"));
  ASSERT_TRUE(policy.contains("provenance"));
  const LinearScorer scorer = LinearScorer::FromJson(policy["scorer"].dump());
  EXPECT_EQ(LinearScorer::FromJson(scorer.ToJson()).ToJson(), scorer.ToJson());
  EXPECT_EQ(Read(dir_ / "a" / "learning_report.csv")
                .rfind("method,value,normalized_value\n", 0),
            0u);

  ASSERT_EQ(Run({"learn", "--config", path, "--out", Path("b"), "--threads",
                 "3"}),
            cli::kExitOk);
  EXPECT_EQ(Snapshot(dir_ / "a"), Snapshot(dir_ / "b"));
}

TEST_F(CliTest, LearnWithoutReplicatesIsAConfigError) {
  json config = LearnConfig();
  config["replicates"] = 0;
  EXPECT_EQ(Run({"learn", "--config", WriteConfig("z.json", config), "--out",
                 Path("out")}),
            cli::kExitConfig);
  EXPECT_NE(err_.str().find("replicates"), std::string::npos) << err_.str();
}

TEST_F(CliTest, SelftestPasses) {
  EXPECT_EQ(Run({"selftest"}), cli::kExitOk);
  EXPECT_EQ(out_.str().find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace ope
