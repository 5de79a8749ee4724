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

#include "ope/experiment.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "ope/error.h"
#include "ope/parallel.h"
#include "ope/random.h"
#include "ope/simulation.h"

namespace ope {
namespace {

// Stream indices under a condition or replicate seed.
constexpr uint64_t kTargetSofteningStream = 0x7461726765740001ULL;
constexpr uint64_t kLoggingSofteningStream = 0x6c6f6767696e6702ULL;
constexpr uint64_t kSampleStream = 1;
constexpr uint64_t kMrdrStream = 2;

std::string FormatLambda(double lambda) {
  if (lambda == kInfinity) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", lambda);
  return buf;
}

std::string SpecLabel(SchemeKind scheme, const WeightMap& map) {
  return std::string(SchemeName(scheme)) + "/" +
         std::string(ShrinkKindName(map.kind)) + "/" + FormatLambda(map.lambda);
}

bool IsDrsKind(EstimatorKind kind) {
  return kind == EstimatorKind::kDrsDirect || kind == EstimatorKind::kDrsUpper ||
         kind == EstimatorKind::kDrsOracle;
}

bool IsSelectingKind(EstimatorKind kind) {
  return kind == EstimatorKind::kDrsDirect ||
         kind == EstimatorKind::kDrsUpper || kind == EstimatorKind::kSwitch;
}

struct ConditionPlan {
  PolicyPtr target;
  PolicyPtr logging;
  double truth = 0.0;
};

class ReplicateRunner {
 public:
  ReplicateRunner(const PreparedDataset& data, const ConditionSpec& spec,
                  const ConditionPlan& plan, const EvaluationOptions& options)
      : data_(data), spec_(spec), plan_(plan), options_(options) {}

  ReplicateResult Run(size_t replicate,
                      std::vector<SelectionReportRow>* report) const;

 private:
  const PreparedDataset& data_;
  const ConditionSpec& spec_;
  const ConditionPlan& plan_;
  const EvaluationOptions& options_;
};

ReplicateResult ReplicateRunner::Run(
    size_t replicate, std::vector<SelectionReportRow>* report) const {
  const uint64_t seed = DeriveSeed(spec_.seed, replicate);
  const Policy& target = *plan_.target;
  const Policy& logging = *plan_.logging;
  const std::vector<LoggedSample> samples =
      SupervisedToBandit(data_.bandit, logging, spec_.n, spec_.reward_mode,
                         DeriveSeed(seed, kSampleStream));
  const double fractions[] = {options_.train_fraction,
                              1.0 - options_.train_fraction};
  const auto parts = SplitBanditData(samples, fractions);
  const std::vector<LoggedSample>& train = parts[0];
  const std::vector<LoggedSample>& eval = parts[1];

  // One fitted predictor and evaluation table per scheme in use.
  std::vector<SchemeKind> schemes;
  auto scheme_index = [&](SchemeKind kind) {
    auto it = std::find(schemes.begin(), schemes.end(), kind);
    if (it != schemes.end()) return static_cast<size_t>(it - schemes.begin());
    schemes.push_back(kind);
    return schemes.size() - 1;
  };
  bool needs_candidates = false;
  for (const RosterEntry& entry : options_.roster) {
    switch (entry.kind) {
      case EstimatorKind::kIps:
      case EstimatorKind::kSnIps:
        scheme_index(SchemeKind::kZeroPredictor);
        break;
      case EstimatorKind::kDm:
      case EstimatorKind::kDr:
      case EstimatorKind::kSnDr:
        scheme_index(entry.scheme);
        break;
      default:
        needs_candidates = true;
        break;
    }
  }
  std::vector<size_t> candidates;
  if (needs_candidates) {
    for (SchemeKind kind : options_.candidate_schemes) {
      candidates.push_back(scheme_index(kind));
    }
  }
  const int k = data_.bandit.num_actions;
  const int d = data_.bandit.feature_dim;
  std::vector<EvalTable> tables;
  tables.reserve(schemes.size());
  for (SchemeKind kind : schemes) {
    const WeightScheme scheme{kind, DeriveSeed(seed, kMrdrStream)};
    const RewardPredictor predictor =
        FitWeightedRidge(train, scheme, &target, k, d, options_.ridge_reg);
    tables.push_back(BuildEvalTable(eval, target, predictor, &logging, &scheme));
  }

  // Candidate sets: DRs over (predictor, shrink kind, lambda) and SWITCH
  // over (predictor, tau).
  const std::vector<double>& weights = tables.front().weight;
  auto build_specs = [&](std::span<const ShrinkKind> kinds) {
    std::vector<EstimatorSpec> specs;
    for (ShrinkKind kind : kinds) {
      const std::vector<double> grid = LambdaGrid(weights, kind);
      for (size_t c : candidates) {
        for (double lambda : grid) specs.push_back({c, WeightMap{kind, lambda}});
      }
    }
    return specs;
  };

  std::vector<EstimatorSpec> drs_specs;
  std::vector<SelectionRule> drs_rules;
  bool want_oracle = false;
  bool want_switch = false;
  for (const RosterEntry& entry : options_.roster) {
    if (entry.kind == EstimatorKind::kDrsDirect) {
      drs_rules.push_back(SelectionRule::kDrsDirect);
    } else if (entry.kind == EstimatorKind::kDrsUpper) {
      drs_rules.push_back(SelectionRule::kDrsUpper);
    } else if (entry.kind == EstimatorKind::kDrsOracle) {
      want_oracle = true;
    } else if (entry.kind == EstimatorKind::kSwitch) {
      want_switch = true;
    }
  }
  std::vector<SelectionResult> drs_results;
  std::vector<double> drs_values;
  if (!drs_rules.empty() || want_oracle) {
    drs_specs = build_specs(options_.shrink_kinds);
    if (!drs_rules.empty()) {
      drs_results = SelectMany(drs_specs, tables, drs_rules);
      for (const SelectionScore& s : drs_results.front().scores) {
        drs_values.push_back(s.estimate);
      }
    } else {
      for (const EstimatorSpec& s : drs_specs) {
        drs_values.push_back(DrsEstimate(tables[s.predictor], s.map).value);
      }
    }
  }
  std::vector<EstimatorSpec> switch_specs;
  SelectionResult switch_result;
  if (want_switch) {
    const ShrinkKind kinds[] = {ShrinkKind::kSwitch};
    switch_specs = build_specs(kinds);
    switch_result = Select(switch_specs, tables, SelectionRule::kPessimistic);
  }

  auto label = [&](const EstimatorSpec& s) {
    return SpecLabel(schemes[s.predictor], s.map);
  };
  auto fill_report = [&](std::span<const EstimatorSpec> specs,
                         const SelectionResult& result) {
    if (report == nullptr || !report->empty()) return;
    for (size_t j = 0; j < specs.size(); ++j) {
      SelectionReportRow row;
      row.spec_id = j;
      row.predictor = std::string(SchemeName(schemes[specs[j].predictor]));
      row.shrink_kind = std::string(ShrinkKindName(specs[j].map.kind));
      row.lambda = specs[j].map.lambda;
      row.score = result.scores[j];
      row.chosen = j == result.chosen;
      report->push_back(std::move(row));
    }
  };

  // The report prefers a DRs rule and falls back to SWITCH.
  const bool has_drs_rule = std::any_of(
      options_.roster.begin(), options_.roster.end(), [](const RosterEntry& e) {
        return e.kind == EstimatorKind::kDrsDirect ||
               e.kind == EstimatorKind::kDrsUpper;
      });
  ReplicateResult out;
  size_t rule_cursor = 0;
  for (const RosterEntry& entry : options_.roster) {
    double value = 0.0;
    std::string chosen;
    switch (entry.kind) {
      case EstimatorKind::kIps:
      case EstimatorKind::kSnIps:
        value = DrsEstimate(tables[scheme_index(SchemeKind::kZeroPredictor)],
                            WeightMap{}, entry.kind == EstimatorKind::kSnIps)
                    .value;
        break;
      case EstimatorKind::kDm:
        value = DmEstimate(tables[scheme_index(entry.scheme)]).value;
        break;
      case EstimatorKind::kDr:
      case EstimatorKind::kSnDr:
        value = DrsEstimate(tables[scheme_index(entry.scheme)], WeightMap{},
                            entry.kind == EstimatorKind::kSnDr)
                    .value;
        break;
      case EstimatorKind::kSwitch:
        value = switch_result.scores[switch_result.chosen].estimate;
        chosen = label(switch_specs[switch_result.chosen]);
        if (!has_drs_rule) fill_report(switch_specs, switch_result);
        break;
      case EstimatorKind::kDrsDirect:
      case EstimatorKind::kDrsUpper: {
        const SelectionResult& result = drs_results[rule_cursor++];
        value = result.scores[result.chosen].estimate;
        chosen = label(drs_specs[result.chosen]);
        fill_report(drs_specs, result);
        break;
      }
      case EstimatorKind::kDrsOracle: {
        const size_t best = OracleSelect(drs_values, plan_.truth);
        value = drs_values[best];
        chosen = label(drs_specs[best]);
        break;
      }
    }
    out.estimates.push_back(value);
    out.chosen.push_back(std::move(chosen));
  }
  return out;
}

}  // namespace

PreparedDataset PrepareDataset(std::string id, const FullInfoDataset& data,
                               uint64_t seed, const LogisticOptions& logistic,
                               double bandit_fraction) {
  data.Validate();
  DatasetSplit split = SplitDataset(data, bandit_fraction, seed);
  if (split.first.size() == 0 || split.second.size() == 0) {
    Fail(ErrorCode::kEmptyDataset,
         "dataset '" + id + "' is too small to split into bandit and holdout");
  }
  PreparedDataset out;
  out.id = std::move(id);
  out.bandit = std::move(split.first);
  out.holdout = std::move(split.second);
  out.pi1 = std::make_shared<DeterministicPolicy>(
      TrainMultinomialLogistic(out.holdout, FeatureMask::kFirstHalf, logistic));
  out.pi2 = std::make_shared<DeterministicPolicy>(TrainMultinomialLogistic(
      out.holdout, FeatureMask::kSecondHalf, logistic));
  return out;
}

std::string_view PolicyBaseName(PolicyBase base) {
  switch (base) {
    case PolicyBase::kPi1: return "pi1";
    case PolicyBase::kPi2: return "pi2";
    case PolicyBase::kUniform: return "uniform";
  }
  return "pi1";
}

PolicyBase ParsePolicyBase(std::string_view name) {
  for (PolicyBase base :
       {PolicyBase::kPi1, PolicyBase::kPi2, PolicyBase::kUniform}) {
    if (PolicyBaseName(base) == name) return base;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown policy base '" + std::string(name) + "'");
}

std::string PolicyLabel(const PolicyParams& params) {
  if (params.base == PolicyBase::kUniform) return "uniform";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s(%g,%g)",
                std::string(PolicyBaseName(params.base)).c_str(), params.alpha,
                params.beta);
  return buf;
}

PolicyPtr MakePolicy(const PreparedDataset& data, const PolicyParams& params,
                     uint64_t softening_seed) {
  switch (params.base) {
    case PolicyBase::kUniform:
      return std::make_shared<UniformPolicy>(data.bandit.num_actions);
    case PolicyBase::kPi1:
      return std::make_shared<SoftenedPolicy>(
          data.pi1, SofteningParams{params.alpha, params.beta, softening_seed});
    case PolicyBase::kPi2:
      return std::make_shared<SoftenedPolicy>(
          data.pi2, SofteningParams{params.alpha, params.beta, softening_seed});
  }
  Fail(ErrorCode::kInvalidArgument, "unknown policy base");
}

RosterEntry ParseRosterEntry(std::string_view token) {
  const size_t colon = token.find(':');
  const std::string_view head = token.substr(0, colon);
  const bool has_scheme = colon != std::string_view::npos;
  RosterEntry entry;
  struct Fixed {
    std::string_view name;
    EstimatorKind kind;
  };
  static constexpr Fixed kFixed[] = {
      {"IPS", EstimatorKind::kIps},
      {"snIPS", EstimatorKind::kSnIps},
      {"SWITCH", EstimatorKind::kSwitch},
      {"DRs-direct", EstimatorKind::kDrsDirect},
      {"DRs-upper", EstimatorKind::kDrsUpper},
      {"DRs-oracle", EstimatorKind::kDrsOracle},
  };
  for (const Fixed& fixed : kFixed) {
    if (head == fixed.name) {
      if (has_scheme) {
        Fail(ErrorCode::kInvalidArgument,
             "estimator '" + std::string(token) + "' takes no predictor");
      }
      entry.name = std::string(fixed.name);
      entry.kind = fixed.kind;
      entry.scheme = SchemeKind::kZeroPredictor;
      return entry;
    }
  }
  if (head == "DM") {
    entry.kind = EstimatorKind::kDm;
    entry.scheme = SchemeKind::kConst1;
  } else if (head == "DR") {
    entry.kind = EstimatorKind::kDr;
    entry.scheme = SchemeKind::kWSquared;
  } else if (head == "snDR") {
    entry.kind = EstimatorKind::kSnDr;
    entry.scheme = SchemeKind::kW;
  } else {
    Fail(ErrorCode::kInvalidArgument,
         "unknown estimator '" + std::string(token) + "'");
  }
  if (has_scheme) entry.scheme = ParseScheme(token.substr(colon + 1));
  entry.name = std::string(head) + ":" + std::string(SchemeName(entry.scheme));
  return entry;
}

std::vector<RosterEntry> DefaultRoster() {
  std::vector<RosterEntry> roster;
  for (std::string_view token : {"snIPS", "IPS", "DM", "DR", "snDR", "SWITCH",
                                 "DRs-direct", "DRs-upper", "DRs-oracle"}) {
    roster.push_back(ParseRosterEntry(token));
  }
  return roster;
}

std::vector<double> ConditionResult::Estimates(size_t estimator) const {
  std::vector<double> out;
  out.reserve(replicates.size());
  for (const ReplicateResult& r : replicates) {
    out.push_back(r.estimates.at(estimator));
  }
  return out;
}

std::vector<ConditionResult> RunEvaluation(
    std::span<const PreparedDataset> datasets,
    std::span<const ConditionSpec> conditions,
    const EvaluationOptions& options, int threads) {
  if (options.roster.empty()) {
    Fail(ErrorCode::kInvalidArgument, "empty estimator roster");
  }
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    Fail(ErrorCode::kBadFractions, "train_fraction must lie in (0, 1)");
  }
  bool needs_candidates = false;
  for (const RosterEntry& entry : options.roster) {
    needs_candidates = needs_candidates || IsDrsKind(entry.kind) ||
                       entry.kind == EstimatorKind::kSwitch;
  }
  if (needs_candidates && options.candidate_schemes.empty()) {
    Fail(ErrorCode::kInvalidArgument, "no candidate reward predictors");
  }

  std::vector<ConditionPlan> plans(conditions.size());
  std::vector<ConditionResult> results(conditions.size());
  std::vector<std::pair<size_t, size_t>> tasks;
  for (size_t c = 0; c < conditions.size(); ++c) {
    const ConditionSpec& spec = conditions[c];
    if (spec.dataset >= datasets.size()) {
      Fail(ErrorCode::kIndexOutOfRange,
           "condition '" + spec.id + "' refers to a missing dataset");
    }
    if (spec.n < 2 || spec.replicates < 1) {
      Fail(ErrorCode::kInvalidArgument,
           "condition '" + spec.id + "' needs n >= 2 and replicates >= 1");
    }
    const PreparedDataset& data = datasets[spec.dataset];
    plans[c].target = MakePolicy(data, spec.target,
                                 DeriveSeed(spec.seed, kTargetSofteningStream));
    plans[c].logging = MakePolicy(
        data, spec.logging, DeriveSeed(spec.seed, kLoggingSofteningStream));
    plans[c].truth =
        TruePolicyValue(*plans[c].target, data.holdout, spec.reward_mode);
    results[c].spec = spec;
    results[c].truth = plans[c].truth;
    for (const RosterEntry& entry : options.roster) {
      results[c].estimators.push_back(entry.name);
    }
    results[c].replicates.resize(spec.replicates);
    for (int r = 0; r < spec.replicates; ++r) tasks.emplace_back(c, r);
  }

  const bool wants_report =
      std::any_of(options.roster.begin(), options.roster.end(),
                  [](const RosterEntry& e) { return IsSelectingKind(e.kind); });
  ParallelFor(tasks.size(), threads, [&](size_t t) {
    const auto [c, r] = tasks[t];
    const ReplicateRunner runner(datasets[conditions[c].dataset], conditions[c],
                                 plans[c], options);
    std::vector<SelectionReportRow>* report =
        (r == 0 && wants_report) ? &results[c].selection_report : nullptr;
    results[c].replicates[r] = runner.Run(r, report);
  });
  return results;
}

std::vector<SummaryRow> Summarize(const ConditionResult& result) {
  std::vector<SummaryRow> rows;
  for (size_t e = 0; e < result.estimators.size(); ++e) {
    const std::vector<double> values = result.Estimates(e);
    SummaryRow row;
    row.condition_id = result.spec.id;
    row.estimator = result.estimators[e];
    row.mse = Mse(values, result.truth);
    row.clipped_mse = ClippedMse(values, result.truth);
    const double mean = Mean(values);
    row.bias = mean - result.truth;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    row.variance =
        values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TTestRow> PairwiseTTests(const ConditionResult& result) {
  std::vector<TTestRow> rows;
  if (result.replicates.size() < 2) return rows;
  std::vector<std::vector<double>> errors;
  for (size_t e = 0; e < result.estimators.size(); ++e) {
    errors.push_back(ClippedSquaredErrors(result.Estimates(e), result.truth));
  }
  for (size_t a = 0; a < errors.size(); ++a) {
    for (size_t b = a + 1; b < errors.size(); ++b) {
      rows.push_back({result.spec.id, result.estimators[a],
                      result.estimators[b], PairedTTest(errors[a], errors[b])});
    }
  }
  return rows;
}

std::vector<CdfRow> RelativeCdfs(std::span<const ConditionResult> results,
                                 std::string_view baseline) {
  std::vector<CdfRow> rows;
  if (results.empty()) return rows;
  const std::vector<std::string>& names = results.front().estimators;
  auto find = [](const std::vector<std::string>& list, std::string_view name) {
    auto it = std::find(list.begin(), list.end(), name);
    if (it == list.end()) {
      Fail(ErrorCode::kInvalidArgument,
           "estimator '" + std::string(name) + "' missing from a condition");
    }
    return static_cast<size_t>(it - list.begin());
  };
  for (const std::string& name : names) {
    std::vector<double> mse;
    std::vector<double> base;
    for (const ConditionResult& result : results) {
      const double b =
          ClippedMse(result.Estimates(find(result.estimators, baseline)),
                     result.truth);
      // Conditions the baseline solves exactly carry no ratio.
      if (!(b > 0.0)) continue;
      mse.push_back(ClippedMse(result.Estimates(find(result.estimators, name)),
                               result.truth));
      base.push_back(b);
    }
    for (const CdfPoint& point : RelativeMseCdf(mse, base)) {
      rows.push_back({name, point});
    }
  }
  return rows;
}

}  // namespace ope
