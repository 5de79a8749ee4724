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

#include <fstream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "commands.h"
#include "ope/error.h"
#include "ope/io.h"
#include "ope/model_selection.h"
#include "ope/random.h"
#include "ope/slate.h"
#include "ope/slate_experiment.h"

namespace ope::cli {
namespace {

constexpr uint64_t kRelevanceStream = 0x4e1;
constexpr uint64_t kSetupStream = 0x4e2;
constexpr uint64_t kRunStream = 0x4e3;
constexpr uint64_t kSampleLogStream = 0x4e4;

RelevanceData ReadRelevance(ConfigObject& root, uint64_t seed) {
  ConfigObject rel = root.Object("relevance");
  RelevanceData data;
  if (rel.Has("synthetic")) {
    if (rel.Has("csv")) {
      throw ConfigError(rel.Field("csv"),
                        "give either 'csv' or 'synthetic', not both");
    }
    ConfigObject syn = rel.Object("synthetic");
    SyntheticRelevanceSpec spec;
    spec.num_queries = syn.Get<size_t>("num_queries", spec.num_queries);
    spec.docs_per_query = syn.Get<int>("docs_per_query", spec.docs_per_query);
    spec.feature_dim = syn.Get<int>("feature_dim", spec.feature_dim);
    spec.noise = syn.Get<double>("noise", spec.noise);
    spec.seed = syn.Get<uint64_t>("seed", DeriveSeed(seed, kRelevanceStream));
    syn.Finish();
    if (spec.num_queries < 2) {
      throw ConfigError(syn.Field("num_queries"), "must be >= 2");
    }
    if (spec.docs_per_query < 1) {
      throw ConfigError(syn.Field("docs_per_query"), "must be >= 1");
    }
    if (spec.feature_dim < 2) {
      throw ConfigError(syn.Field("feature_dim"), "must be >= 2");
    }
    data = MakeSyntheticRelevance(spec);
  } else {
    data = LoadRelevance(rel.Require<std::string>("csv"));
  }
  rel.Finish();
  return data;
}

// DM, DR-PI and the selected DRs-PI on externally supplied logs, with a
// ridge predictor on all features fit to the first part of the logs.
void EvaluateLoggedSlates(const SlateEnvironment& env,
                          const std::vector<LoggedSlateSample>& logs,
                          double train_fraction, double reg,
                          std::ofstream& file) {
  const auto cut = static_cast<size_t>(
      std::floor(train_fraction * static_cast<double>(logs.size()) + 1e-9));
  if (cut == 0 || cut + 2 > logs.size()) {
    Fail(ErrorCode::kEmptyDataset, "too few slate log rows to split");
  }
  const std::span<const LoggedSlateSample> all(logs);
  std::vector<int> every(env.feature_dim);
  std::iota(every.begin(), every.end(), 0);
  const SlatePredictor predictor =
      FitSlatePredictor(env, all.first(cut), every, reg);
  const auto eval = all.subspan(cut);
  std::vector<const SlateContextState*> states;
  std::vector<Eigen::VectorXd> eta;
  for (const LoggedSlateSample& s : eval) {
    const SlateContext& ctx = env.contexts[env.index_of.at(s.context_id)];
    states.push_back(&ctx.state);
    eta.push_back(predictor.Coefficients(ctx));
  }
  const EvalTable tables[] = {BuildSlateEvalTable(eval, states, eta, env.basis)};
  std::vector<EstimatorSpec> specs;
  for (double lambda : SlateLambdaGrid(tables[0].weight)) {
    specs.push_back({0, WeightMap{ShrinkKind::kOptimistic, lambda}});
  }
  const SelectionResult selected = Select(specs, tables, SelectionRule::kDirect);

  static constexpr std::string_view kHeader[] = {"estimator", "lambda",
                                                 "estimate"};
  CsvWriter csv(file, kHeader);
  csv.Field("DM").Field(0.0).Field(DrsPiEstimate(tables[0], 0.0).value).EndRow();
  csv.Field("DR-PI")
      .Field(kInfinity)
      .Field(DrsPiEstimate(tables[0], kInfinity).value)
      .EndRow();
  csv.Field("DRs-PI")
      .Field(specs[selected.chosen].map.lambda)
      .Field(selected.scores[selected.chosen].estimate)
      .EndRow();
}

}  // namespace

int RunSlate(const nlohmann::json& config, const CommonOptions& common,
             std::ostream& out) {
  ConfigObject root(config, "");
  const RunSettings settings = ReadRunSettings(root, common);

  SlateSetupOptions setup;
  setup.slate_length = root.Get<int>("slate_length", setup.slate_length);
  setup.num_items = root.Get<int>("num_items", setup.num_items);
  if (setup.slate_length < 1) {
    throw ConfigError("slate_length", "must be >= 1");
  }
  if (setup.slate_length > setup.num_items) {
    throw ConfigError("slate_length",
                      std::to_string(setup.slate_length) +
                          " exceeds num_items " +
                          std::to_string(setup.num_items));
  }
  if (setup.slate_length == setup.num_items && setup.num_items > 1) {
    throw ConfigError("slate_length",
                      "must be below num_items when more than one item");
  }
  setup.scorer_fraction =
      root.Get<double>("scorer_fraction", setup.scorer_fraction);
  if (!(setup.scorer_fraction > 0.0 && setup.scorer_fraction < 1.0)) {
    throw ConfigError("scorer_fraction", "must lie in (0, 1)");
  }
  setup.ridge_reg = root.Get<double>("ridge_reg", setup.ridge_reg);
  if (!(setup.ridge_reg > 0.0)) throw ConfigError("ridge_reg", "must be > 0");
  setup.epsilons = root.Get<std::vector<double>>("epsilons", setup.epsilons);
  if (setup.epsilons.empty()) throw ConfigError("epsilons", "must not be empty");
  for (double e : setup.epsilons) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw ConfigError("epsilons", "values must lie in [0, 1]");
    }
  }
  setup.seed = DeriveSeed(settings.seed, kSetupStream);

  SlateRunOptions run;
  {
    std::vector<std::string> modes =
        root.Get<std::vector<std::string>>("reward_modes",
                                           {"deterministic", "stochastic"});
    if (modes.empty()) throw ConfigError("reward_modes", "must not be empty");
    run.reward_modes.clear();
    for (size_t i = 0; i < modes.size(); ++i) {
      try {
        run.reward_modes.push_back(ParseRewardMode(modes[i]));
      } catch (const OpeError&) {
        throw ConfigError("reward_modes[" + std::to_string(i) + "]",
                          "unknown value '" + modes[i] + "'");
      }
    }
  }
  run.sample_sizes =
      root.Get<std::vector<size_t>>("sample_sizes", run.sample_sizes);
  if (run.sample_sizes.empty()) {
    throw ConfigError("sample_sizes", "must not be empty");
  }
  for (size_t n : run.sample_sizes) {
    if (n < 4) throw ConfigError("sample_sizes", "values must be >= 4");
  }
  run.replicates = root.Get<int>("replicates", run.replicates);
  if (run.replicates < 1) throw ConfigError("replicates", "must be >= 1");
  run.train_fraction = root.Get<double>("train_fraction", run.train_fraction);
  if (!(run.train_fraction > 0.0 && run.train_fraction < 1.0)) {
    throw ConfigError("train_fraction", "must lie in (0, 1)");
  }
  run.ridge_reg = root.Get<double>("predictor_reg", run.ridge_reg);
  if (!(run.ridge_reg > 0.0)) throw ConfigError("predictor_reg", "must be > 0");
  run.seed = DeriveSeed(settings.seed, kRunStream);
  const std::string logs_path = root.Get<std::string>("logs", "");
  const bool write_logs = root.Get<bool>("write_logs", false);
  const RelevanceData relevance = ReadRelevance(root, settings.seed);
  root.Finish();

  const SlateEnvironment env = BuildSlateEnvironment(relevance, setup);
  out << "basis size: " << env.basis.size() << '\n';
  out << "bandit queries: " << env.contexts.size() << '\n';

  const std::vector<SlateResultRow> rows =
      RunSlateExperiment(env, run, settings.threads);
  {
    std::ofstream file = OpenOutput(settings.out_dir, "slate_mse.csv");
    static constexpr std::string_view kHeader[] = {
        "reward_mode", "predictor", "n", "estimator", "mse"};
    CsvWriter csv(file, kHeader);
    for (const SlateResultRow& row : rows) {
      csv.Field(RewardModeName(row.reward_mode))
          .Field(row.predictor)
          .Field(static_cast<long long>(row.n))
          .Field(row.estimator)
          .Field(row.mse)
          .EndRow();
    }
  }
  if (write_logs) {
    const auto logs =
        SimulateSlateLogs(env, run.sample_sizes.back(), run.reward_modes.front(),
                          DeriveSeed(settings.seed, kSampleLogStream));
    OpenOutput(settings.out_dir, "slate_logs.csv");
    SaveSlateLogs(logs, (settings.out_dir / "slate_logs.csv").string());
  }
  if (!logs_path.empty()) {
    const std::vector<LoggedSlateSample> logs = LoadSlateLogs(logs_path, env);
    std::ofstream file = OpenOutput(settings.out_dir, "slate_logged.csv");
    EvaluateLoggedSlates(env, logs, run.train_fraction, run.ridge_reg, file);
  }
  out << "wrote " << rows.size() << " slate rows to "
      << settings.out_dir.string() << '\n';
  return 0;
}

}  // namespace ope::cli
