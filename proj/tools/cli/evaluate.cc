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
#include <ostream>
#include <string>
#include <vector>

#include "commands.h"
#include "ope/error.h"
#include "ope/experiment.h"
#include "ope/io.h"
#include "ope/random.h"

namespace ope::cli {
namespace {

constexpr uint64_t kDatasetStream = 0xda7a0000;
constexpr uint64_t kSyntheticStream = 0x5e700000;
constexpr uint64_t kConditionStream = 0xc0de;

template <typename T, typename Parse>
std::vector<T> ReadList(ConfigObject& obj, const std::string& key,
                        const std::vector<std::string>& fallback, Parse parse) {
  const auto names = obj.Get<std::vector<std::string>>(key, fallback);
  if (names.empty()) throw ConfigError(obj.Field(key), "must not be empty");
  std::vector<T> out;
  for (size_t i = 0; i < names.size(); ++i) {
    const std::string field = obj.Field(key) + "[" + std::to_string(i) + "]";
    try {
      out.push_back(parse(names[i], field));
    } catch (const OpeError&) {
      throw ConfigError(field, "unknown value '" + names[i] + "'");
    }
  }
  return out;
}

}  // namespace

int RunEvaluate(const nlohmann::json& config, const CommonOptions& common,
                std::ostream& out) {
  ConfigObject root(config, "");
  const RunSettings settings = ReadRunSettings(root, common);

  LogisticOptions logistic;
  logistic.reg = root.Get<double>("logistic_reg", logistic.reg);
  if (!(logistic.reg > 0.0)) throw ConfigError("logistic_reg", "must be > 0");
  const double bandit_fraction = root.Get<double>("bandit_fraction", 0.75);
  if (!(bandit_fraction > 0.0 && bandit_fraction < 1.0)) {
    throw ConfigError("bandit_fraction", "must lie in (0, 1)");
  }

  EvaluationOptions options;
  if (root.Has("roster")) {
    options.roster = ReadList<RosterEntry>(
        root, "roster", {}, [](const std::string& name, const std::string&) {
          return ParseRosterEntry(name);
        });
  } else {
    root.Get<std::vector<std::string>>("roster", {});
  }
  {
    std::vector<std::string> defaults;
    for (SchemeKind s : options.candidate_schemes) {
      defaults.emplace_back(SchemeName(s));
    }
    options.candidate_schemes = ReadList<SchemeKind>(
        root, "candidate_schemes", defaults,
        [](const std::string& name, const std::string&) {
          return ParseScheme(name);
        });
  }
  options.shrink_kinds = ReadList<ShrinkKind>(
      root, "shrink_kinds", {"optimistic", "pessimistic"},
      [](const std::string& name, const std::string& field) {
        const ShrinkKind kind = ParseShrinkKind(name);
        if (kind != ShrinkKind::kOptimistic &&
            kind != ShrinkKind::kPessimistic) {
          throw ConfigError(field, "must be optimistic or pessimistic");
        }
        return kind;
      });
  options.ridge_reg = root.Get<double>("ridge_reg", options.ridge_reg);
  if (!(options.ridge_reg > 0.0)) throw ConfigError("ridge_reg", "must be > 0");
  options.train_fraction =
      root.Get<double>("train_fraction", options.train_fraction);
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    throw ConfigError("train_fraction", "must lie in (0, 1)");
  }
  const std::string baseline = root.Get<std::string>("cdf_baseline", "snIPS");

  std::vector<PreparedDataset> datasets;
  {
    std::vector<ConfigObject> entries = root.Objects("datasets");
    if (entries.empty()) throw ConfigError("datasets", "must not be empty");
    for (size_t i = 0; i < entries.size(); ++i) {
      DatasetEntry entry = ReadDatasetEntry(
          entries[i], DeriveSeed(settings.seed, kSyntheticStream + i));
      for (const PreparedDataset& other : datasets) {
        if (other.id == entry.id) {
          throw ConfigError(entries[i].Field("id"),
                            "duplicate dataset id '" + entry.id + "'");
        }
      }
      datasets.push_back(PrepareDataset(
          entry.id, entry.data, DeriveSeed(settings.seed, kDatasetStream + i),
          logistic, bandit_fraction));
    }
  }

  std::vector<ConditionSpec> conditions;
  {
    ConfigObject grid = root.Object("conditions");
    std::vector<size_t> dataset_index;
    const auto ids = grid.Get<std::vector<std::string>>("datasets", {});
    if (ids.empty()) {
      for (size_t i = 0; i < datasets.size(); ++i) dataset_index.push_back(i);
    }
    for (size_t i = 0; i < ids.size(); ++i) {
      size_t found = datasets.size();
      for (size_t d = 0; d < datasets.size(); ++d) {
        if (datasets[d].id == ids[i]) found = d;
      }
      if (found == datasets.size()) {
        throw ConfigError(grid.Field("datasets") + "[" + std::to_string(i) + "]",
                          "unknown dataset id '" + ids[i] + "'");
      }
      dataset_index.push_back(found);
    }
    const auto targets = ReadList<PolicyParams>(grid, "targets", {"pi1(0.9,0)"},
                                                ParsePolicyParams);
    const auto loggings =
        ReadList<PolicyParams>(grid, "loggings", {}, ParsePolicyParams);
    const auto modes = ReadList<RewardMode>(
        grid, "reward_modes", {"deterministic"},
        [](const std::string& name, const std::string&) {
          return ParseRewardMode(name);
        });
    const auto sizes = grid.Get<std::vector<size_t>>("n", {1000});
    if (sizes.empty()) throw ConfigError(grid.Field("n"), "must not be empty");
    for (size_t n : sizes) {
      if (n < 4) throw ConfigError(grid.Field("n"), "values must be >= 4");
    }
    const int replicates = grid.Get<int>("replicates", 100);
    if (replicates < 2) {
      throw ConfigError(grid.Field("replicates"), "must be >= 2");
    }
    grid.Finish();

    const uint64_t condition_base = DeriveSeed(settings.seed, kConditionStream);
    for (size_t d : dataset_index) {
      for (const PolicyParams& target : targets) {
        for (const PolicyParams& logging : loggings) {
          for (RewardMode mode : modes) {
            for (size_t n : sizes) {
              ConditionSpec spec;
              const size_t index = conditions.size();
              spec.id = "c" + std::to_string(index);
              spec.dataset = d;
              spec.target = target;
              spec.logging = logging;
              spec.reward_mode = mode;
              spec.n = n;
              spec.replicates = replicates;
              spec.seed = DeriveSeed(condition_base, index);
              conditions.push_back(spec);
            }
          }
        }
      }
    }
  }
  root.Finish();

  const std::vector<ConditionResult> results =
      RunEvaluation(datasets, conditions, options, settings.threads);

  {
    std::ofstream file = OpenOutput(settings.out_dir, "conditions.csv");
    static constexpr std::string_view kHeader[] = {
        "condition_id", "dataset", "target",     "logging",
        "reward_mode",  "n",       "replicates", "truth"};
    CsvWriter csv(file, kHeader);
    for (const ConditionResult& r : results) {
      csv.Field(r.spec.id)
          .Field(datasets[r.spec.dataset].id)
          .Field(PolicyLabel(r.spec.target))
          .Field(PolicyLabel(r.spec.logging))
          .Field(RewardModeName(r.spec.reward_mode))
          .Field(static_cast<long long>(r.spec.n))
          .Field(static_cast<long long>(r.spec.replicates))
          .Field(r.truth)
          .EndRow();
    }
  }
  {
    std::ofstream file = OpenOutput(settings.out_dir, "results.csv");
    static constexpr std::string_view kHeader[] = {
        "condition_id", "estimator", "mse", "clipped_mse", "bias_est",
        "var_est"};
    CsvWriter csv(file, kHeader);
    for (const ConditionResult& r : results) {
      for (const SummaryRow& row : Summarize(r)) {
        csv.Field(row.condition_id)
            .Field(row.estimator)
            .Field(row.mse)
            .Field(row.clipped_mse)
            .Field(row.bias)
            .Field(row.variance)
            .EndRow();
      }
    }
  }
  for (const ConditionResult& r : results) {
    if (r.selection_report.empty()) continue;
    std::ofstream file =
        OpenOutput(settings.out_dir, "selection_" + r.spec.id + ".csv");
    static constexpr std::string_view kHeader[] = {
        "spec_id", "predictor", "shrink_kind", "lambda",
        "bias_ub", "var_hat",   "objective",   "chosen"};
    CsvWriter csv(file, kHeader);
    for (const SelectionReportRow& row : r.selection_report) {
      csv.Field(static_cast<long long>(row.spec_id))
          .Field(row.predictor)
          .Field(row.shrink_kind)
          .Field(row.lambda)
          .Field(row.score.bias_ub)
          .Field(row.score.variance_hat)
          .Field(row.score.objective)
          .Field(static_cast<long long>(row.chosen ? 1 : 0))
          .EndRow();
    }
  }
  {
    std::ofstream file = OpenOutput(settings.out_dir, "ttest.csv");
    static constexpr std::string_view kHeader[] = {
        "condition_id", "estimator_a", "estimator_b", "t", "p"};
    CsvWriter csv(file, kHeader);
    for (const ConditionResult& r : results) {
      for (const TTestRow& row : PairwiseTTests(r)) {
        csv.Field(row.condition_id)
            .Field(row.estimator_a)
            .Field(row.estimator_b)
            .Field(row.test.t)
            .Field(row.test.p)
            .EndRow();
      }
    }
  }
  {
    std::ofstream file = OpenOutput(settings.out_dir, "cdf.csv");
    static constexpr std::string_view kHeader[] = {"estimator", "ratio", "cdf"};
    CsvWriter csv(file, kHeader);
    bool has_baseline = false;
    for (const RosterEntry& e : options.roster) {
      has_baseline = has_baseline || e.name == baseline;
    }
    if (has_baseline) {
      for (const CdfRow& row : RelativeCdfs(results, baseline)) {
        csv.Field(row.estimator)
            .Field(row.point.ratio)
            .Field(row.point.cdf)
            .EndRow();
      }
    }
  }
  out << "evaluated " << results.size() << " condition(s) x "
      << (results.empty() ? 0 : results.front().spec.replicates)
      << " replicate(s); outputs in " << settings.out_dir.string() << '\n';
  return 0;
}

}  // namespace ope::cli
