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

#ifndef OPE_EXPERIMENT_H_
#define OPE_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ope/data.h"
#include "ope/estimators.h"
#include "ope/model_selection.h"
#include "ope/policy.h"
#include "ope/policy_kit.h"
#include "ope/reward_model.h"
#include "ope/stats.h"

namespace ope {

// A dataset cut into the bandit pool (contexts are sampled from it) and the
// held-out part that trains the base policies and measures ground truth.
struct PreparedDataset {
  std::string id;
  FullInfoDataset bandit;
  FullInfoDataset holdout;
  PolicyPtr pi1;  // argmax of a logistic model on the first half of features
  PolicyPtr pi2;  // same on the second half
};

// 75% / 25% split, then trains the two deterministic base policies.
PreparedDataset PrepareDataset(std::string id, const FullInfoDataset& data,
                               uint64_t seed,
                               const LogisticOptions& logistic = {},
                               double bandit_fraction = 0.75);

enum class PolicyBase { kPi1, kPi2, kUniform };

std::string_view PolicyBaseName(PolicyBase base);
PolicyBase ParsePolicyBase(std::string_view name);

struct PolicyParams {
  PolicyBase base = PolicyBase::kPi1;
  double alpha = 0.9;
  double beta = 0.0;
};

// "pi1(0.9,0)" style label.
std::string PolicyLabel(const PolicyParams& params);

// The softened base policy; kUniform ignores alpha and beta.
PolicyPtr MakePolicy(const PreparedDataset& data, const PolicyParams& params,
                     uint64_t softening_seed);

struct ConditionSpec {
  std::string id;
  size_t dataset = 0;  // index into the prepared datasets
  PolicyParams target;
  PolicyParams logging;
  RewardMode reward_mode = RewardMode::kDeterministic;
  size_t n = 1000;
  int replicates = 100;
  uint64_t seed = 0;
};

enum class EstimatorKind {
  kIps,
  kSnIps,
  kDm,
  kDr,
  kSnDr,
  kSwitch,
  kDrsDirect,
  kDrsUpper,
  kDrsOracle,
};

struct RosterEntry {
  std::string name;
  EstimatorKind kind = EstimatorKind::kDr;
  // The predictor of DM, DR and snDR.
  SchemeKind scheme = SchemeKind::kConst1;
};

// Parses "IPS", "snIPS", "SWITCH", "DRs-direct", "DRs-upper", "DRs-oracle",
// and "DM", "DR", "snDR" with an optional ":<scheme>" suffix (defaults z1,
// w2 and w). Names are canonicalized with the scheme spelled out.
RosterEntry ParseRosterEntry(std::string_view token);

std::vector<RosterEntry> DefaultRoster();

struct EvaluationOptions {
  std::vector<RosterEntry> roster = DefaultRoster();
  // Reward predictors available to DRs and SWITCH.
  std::vector<SchemeKind> candidate_schemes = {SchemeKind::kZeroPredictor,
                                               SchemeKind::kWSquared};
  std::vector<ShrinkKind> shrink_kinds = {ShrinkKind::kOptimistic,
                                          ShrinkKind::kPessimistic};
  double ridge_reg = 1.0;
  // Share of each replicate's samples used to fit reward predictors.
  double train_fraction = 0.5;
};

struct SelectionReportRow {
  size_t spec_id = 0;
  std::string predictor;
  std::string shrink_kind;
  double lambda = 0.0;
  SelectionScore score;
  bool chosen = false;
};

struct ReplicateResult {
  std::vector<double> estimates;    // one per roster entry
  std::vector<std::string> chosen;  // selected spec, empty for fixed ones
};

struct ConditionResult {
  ConditionSpec spec;
  double truth = 0.0;
  std::vector<std::string> estimators;
  std::vector<ReplicateResult> replicates;
  // Scores of every candidate on replicate 0 under the first DRs-direct or
  // DRs-upper roster entry, or under SWITCH when the roster has neither.
  std::vector<SelectionReportRow> selection_report;

  std::vector<double> Estimates(size_t estimator) const;
};

// Runs every condition x replicate pair on `threads` workers. Replicate r
// of a condition draws from DeriveSeed(condition seed, r), so the output is
// identical for any thread count.
std::vector<ConditionResult> RunEvaluation(
    std::span<const PreparedDataset> datasets,
    std::span<const ConditionSpec> conditions,
    const EvaluationOptions& options, int threads = 1);

struct SummaryRow {
  std::string condition_id;
  std::string estimator;
  double mse = 0.0;
  double clipped_mse = 0.0;
  double bias = 0.0;      // mean estimate - truth
  double variance = 0.0;  // sample variance of the estimates
};

std::vector<SummaryRow> Summarize(const ConditionResult& result);

struct TTestRow {
  std::string condition_id;
  std::string estimator_a;
  std::string estimator_b;
  TTestResult test;
};

// Paired t-tests on clipped squared errors for every estimator pair.
std::vector<TTestRow> PairwiseTTests(const ConditionResult& result);

struct CdfRow {
  std::string estimator;
  CdfPoint point;
};

// Clipped-MSE ratios to `baseline` across conditions, per estimator.
std::vector<CdfRow> RelativeCdfs(std::span<const ConditionResult> results,
                                 std::string_view baseline = "snIPS");

}  // namespace ope

#endif  // OPE_EXPERIMENT_H_
