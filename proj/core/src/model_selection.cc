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

#include "ope/model_selection.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ope/error.h"

namespace ope {
namespace {

constexpr int kGridPoints = 30;

double Mean(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double MeanSquare(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v * v;
  return total / static_cast<double>(values.size());
}

// Twice the standard error of the mean of `terms`.
double TwoSe(std::span<const double> terms) {
  return 2.0 * std::sqrt(SampleVarianceOfMean(terms));
}

void RequireActionTables(const EvalTable& table, BiasMode mode) {
  if (!table.has_action_tables()) {
    Fail(ErrorCode::kInvalidArgument,
         std::string(BiasModeName(mode)) +
             " bias needs the logging distribution of every context");
  }
}

std::vector<double> DirectTerms(const EvalTable& table, const WeightMap& map) {
  std::vector<double> terms(table.size());
  for (size_t i = 0; i < table.size(); ++i) {
    const double w = table.weight[i];
    terms[i] = (map.Apply(w) - w) * table.residual[i];
  }
  return terms;
}

std::vector<double> PessimisticTerms(const EvalTable& table,
                                     const WeightMap& map) {
  RequireActionTables(table, BiasMode::kPessimistic);
  const int k = table.num_actions;
  std::vector<double> terms(table.size());
  for (size_t i = 0; i < table.size(); ++i) {
    double total = 0.0;
    for (int a = 0; a < k; ++a) {
      const double pi = table.target_probs[i * k + a];
      if (pi == 0.0) continue;
      const double mu = table.logging_probs[i * k + a];
      if (!(mu > 0.0)) {
        Fail(ErrorCode::kAbsoluteContinuityViolation,
             "target plays an action the logging policy never takes");
      }
      const double w = pi / mu;
      total += pi * std::abs(map.Apply(w) / w - 1.0);
    }
    terms[i] = total;
  }
  return terms;
}

struct OptimisticTerms {
  std::vector<double> t1;
  std::vector<double> t2;
  double z_max = 0.0;
  double w_over_z_max = 0.0;
};

OptimisticTerms ComputeOptimisticTerms(const EvalTable& table,
                                       const WeightMap& map) {
  RequireActionTables(table, BiasMode::kOptimistic);
  const int k = table.num_actions;
  const size_t n = table.size();
  OptimisticTerms out;
  out.t1.resize(n);
  out.t2.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out.t1[i] = table.sample_z[i] * table.residual[i] * table.residual[i];
    double total = 0.0;
    for (int a = 0; a < k; ++a) {
      const size_t idx = i * k + a;
      const double mu = table.logging_probs[idx];
      const double z = table.action_z[idx];
      out.z_max = std::max(out.z_max, z);
      if (!(mu > 0.0)) continue;
      const double w = table.target_probs[idx] / mu;
      if (z > 0.0 && w > 0.0) out.w_over_z_max = std::max(out.w_over_z_max, w / z);
      const double diff = map.Apply(w) - w;
      if (diff == 0.0) continue;
      if (!(z > 0.0)) {
        Fail(ErrorCode::kZeroWeightScheme,
             "optimistic bias bound hit z(x, a) = 0 on a shrunk pair");
      }
      total += mu * diff * diff / z;
    }
    out.t2[i] = total;
  }
  return out;
}

void RequireInflatable(const EvalTable& table, Inflation inflation) {
  if (table.size() == 0) Fail(ErrorCode::kEmptyDataset, "no samples");
  if (inflation != Inflation::kNone && table.size() < 2) {
    Fail(ErrorCode::kTooFewSamples, "inflated bias bounds need n >= 2");
  }
}

}  // namespace

double Quantile(std::span<const double> values, double p) {
  if (values.empty()) Fail(ErrorCode::kEmptyDataset, "quantile of nothing");
  if (!(p >= 0.0 && p <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "quantile level outside [0, 1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> LambdaGrid(std::span<const double> weights,
                               ShrinkKind kind) {
  if (weights.empty()) {
    Fail(ErrorCode::kDegenerateWeights, "no weights to build a grid from");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      Fail(ErrorCode::kDegenerateWeights,
           "weights must be finite and nonnegative");
    }
  }
  const double q05 = Quantile(weights, 0.05);
  const double q95 = Quantile(weights, 0.95);
  double lo = 0.0;
  double hi = 0.0;
  switch (kind) {
    case ShrinkKind::kPessimistic:
    case ShrinkKind::kSwitch:
      lo = q05;
      hi = q95;
      break;
    case ShrinkKind::kOptimistic:
      lo = 0.01 * q05 * q05;
      hi = 100.0 * q95 * q95;
      break;
    default:
      Fail(ErrorCode::kInvalidArgument,
           "no lambda grid for shrinkage kind '" +
               std::string(ShrinkKindName(kind)) + "'");
  }
  std::vector<double> grid;
  if (hi > 0.0) {
    if (lo <= 0.0) lo = hi * 1e-6;
    const double log_lo = std::log(lo);
    const double log_hi = std::log(hi);
    for (int j = 0; j < kGridPoints; ++j) {
      double value;
      if (j == 0) {
        value = lo;
      } else if (j == kGridPoints - 1) {
        value = hi;
      } else {
        value = std::exp(log_lo + (log_hi - log_lo) * j / (kGridPoints - 1));
      }
      if (grid.empty() || value != grid.back()) grid.push_back(value);
    }
  }
  grid.push_back(0.0);
  grid.push_back(kInfinity);
  return grid;
}

double SampleVarianceOfMean(std::span<const double> values) {
  const size_t n = values.size();
  if (n < 2) Fail(ErrorCode::kTooFewSamples, "variance needs n >= 2");
  const double mean = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double nd = static_cast<double>(n);
  return ss / (nd - 1.0) / nd;
}

std::string_view BiasModeName(BiasMode mode) {
  switch (mode) {
    case BiasMode::kDirect: return "direct";
    case BiasMode::kOptimistic: return "optimistic";
    case BiasMode::kPessimistic: return "pessimistic";
  }
  return "direct";
}

std::string_view InflationName(Inflation inflation) {
  switch (inflation) {
    case Inflation::kNone: return "none";
    case Inflation::kTwoSe: return "two_se";
    case Inflation::kBernstein: return "bernstein";
  }
  return "none";
}

Inflation ParseInflation(std::string_view name) {
  for (Inflation inflation :
       {Inflation::kNone, Inflation::kTwoSe, Inflation::kBernstein}) {
    if (InflationName(inflation) == name) return inflation;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown inflation '" + std::string(name) + "'");
}

double BiasEstimate(BiasMode mode, const EvalTable& table,
                    const WeightMap& map) {
  return BiasUpper(mode, Inflation::kNone, table, map);
}

double BiasUpper(BiasMode mode, Inflation inflation, const EvalTable& table,
                 const WeightMap& map) {
  RequireInflatable(table, inflation);
  const double n = static_cast<double>(table.size());
  const double log_term = std::log(2.0 / kBernsteinDelta);
  switch (mode) {
    case BiasMode::kDirect: {
      const std::vector<double> terms = DirectTerms(table, map);
      const double estimate = std::abs(Mean(terms));
      if (inflation == Inflation::kTwoSe) return estimate + TwoSe(terms);
      if (inflation == Inflation::kBernstein) {
        const double w_max =
            *std::max_element(table.weight.begin(), table.weight.end());
        return estimate +
               std::sqrt(2.0 * MeanSquare(table.weight) * log_term / n) +
               2.0 * w_max * log_term / (3.0 * n);
      }
      return estimate;
    }
    case BiasMode::kPessimistic: {
      const std::vector<double> terms = PessimisticTerms(table, map);
      const double estimate = Mean(terms);
      if (inflation == Inflation::kTwoSe) return estimate + TwoSe(terms);
      if (inflation == Inflation::kBernstein) {
        return estimate + std::sqrt(std::log(1.0 / kBernsteinDelta) / (2.0 * n));
      }
      return estimate;
    }
    case BiasMode::kOptimistic: {
      const OptimisticTerms terms = ComputeOptimisticTerms(table, map);
      double t1 = Mean(terms.t1);
      double t2 = Mean(terms.t2);
      if (inflation == Inflation::kTwoSe) {
        t1 += TwoSe(terms.t1);
        t2 += TwoSe(terms.t2);
      } else if (inflation == Inflation::kBernstein) {
        t1 += std::sqrt(2.0 * MeanSquare(table.sample_z) * log_term / n) +
              2.0 * terms.z_max * log_term / (3.0 * n);
        t2 += std::sqrt(terms.w_over_z_max * log_term / (2.0 * n));
      }
      return std::sqrt(t1 * t2);
    }
  }
  return 0.0;
}

std::string_view SelectionRuleName(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::kDrsDirect: return "drs_direct";
    case SelectionRule::kDrsUpper: return "drs_upper";
    case SelectionRule::kPessimistic: return "pessimistic";
    case SelectionRule::kDirect: return "direct";
  }
  return "drs_direct";
}

SelectionRule ParseSelectionRule(std::string_view name) {
  for (SelectionRule rule :
       {SelectionRule::kDrsDirect, SelectionRule::kDrsUpper,
        SelectionRule::kPessimistic, SelectionRule::kDirect}) {
    if (SelectionRuleName(rule) == name) return rule;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown selection rule '" + std::string(name) + "'");
}

namespace {

// Raw and two-SE bounds of one mode from a single pass over the terms.
struct BiasPair {
  double raw = kInfinity;
  double upper = kInfinity;
};

BiasPair ComputeBiasPair(BiasMode mode, const EvalTable& table,
                         const WeightMap& map, bool want_upper) {
  BiasPair out;
  switch (mode) {
    case BiasMode::kDirect: {
      const std::vector<double> terms = DirectTerms(table, map);
      out.raw = std::abs(Mean(terms));
      if (want_upper) out.upper = out.raw + TwoSe(terms);
      break;
    }
    case BiasMode::kPessimistic: {
      const std::vector<double> terms = PessimisticTerms(table, map);
      out.raw = Mean(terms);
      if (want_upper) out.upper = out.raw + TwoSe(terms);
      break;
    }
    case BiasMode::kOptimistic: {
      const OptimisticTerms terms = ComputeOptimisticTerms(table, map);
      const double t1 = Mean(terms.t1);
      const double t2 = Mean(terms.t2);
      out.raw = std::sqrt(t1 * t2);
      if (want_upper) {
        out.upper = std::sqrt((t1 + TwoSe(terms.t1)) * (t2 + TwoSe(terms.t2)));
      }
      break;
    }
  }
  return out;
}

// An analytic bound that cannot be evaluated drops out of the minimum.
BiasPair AnalyticBiasPair(BiasMode mode, const EvalTable& table,
                          const WeightMap& map, bool want_upper) {
  if (!table.has_action_tables()) return {};
  try {
    return ComputeBiasPair(mode, table, map, want_upper);
  } catch (const OpeError& e) {
    if (e.code() == ErrorCode::kZeroWeightScheme) return {};
    throw;
  }
}

bool Better(const SelectionScore& cand, double cand_lambda,
            const SelectionScore& best, double best_lambda) {
  if (cand.objective != best.objective) return cand.objective < best.objective;
  if (cand.bias_ub != best.bias_ub) return cand.bias_ub < best.bias_ub;
  return cand_lambda < best_lambda;
}

}  // namespace

std::vector<SelectionScore> ScoreSpec(const EstimatorSpec& spec,
                                      std::span<const EvalTable> tables,
                                      std::span<const SelectionRule> rules) {
  if (spec.predictor >= tables.size()) {
    Fail(ErrorCode::kIndexOutOfRange, "spec refers to a missing predictor");
  }
  const EvalTable& table = tables[spec.predictor];
  const EstimateBreakdown estimate = DrsEstimate(table, spec.map);
  const double variance_hat = SampleVarianceOfMean(estimate.terms);

  bool need_upper = false;
  bool need_analytic = false;
  for (SelectionRule rule : rules) {
    need_upper = need_upper || rule == SelectionRule::kDrsUpper;
    need_analytic = need_analytic || rule == SelectionRule::kDrsDirect ||
                    rule == SelectionRule::kDrsUpper;
  }
  const BiasPair direct =
      ComputeBiasPair(BiasMode::kDirect, table, spec.map, need_upper);
  BiasPair optimistic;
  BiasPair pessimistic;
  if (need_analytic) {
    optimistic =
        AnalyticBiasPair(BiasMode::kOptimistic, table, spec.map, need_upper);
    pessimistic =
        AnalyticBiasPair(BiasMode::kPessimistic, table, spec.map, need_upper);
  }

  std::vector<SelectionScore> scores;
  scores.reserve(rules.size());
  for (SelectionRule rule : rules) {
    SelectionScore score;
    score.estimate = estimate.value;
    score.variance_hat = variance_hat;
    switch (rule) {
      case SelectionRule::kDrsDirect:
        score.bias_ub = std::min({direct.raw, optimistic.raw, pessimistic.raw});
        break;
      case SelectionRule::kDrsUpper:
        score.bias_ub =
            std::min({direct.upper, optimistic.upper, pessimistic.upper});
        break;
      case SelectionRule::kPessimistic:
        score.bias_ub = BiasEstimate(BiasMode::kPessimistic, table, spec.map);
        break;
      case SelectionRule::kDirect:
        score.bias_ub = direct.raw;
        break;
    }
    score.objective = score.bias_ub * score.bias_ub + score.variance_hat;
    scores.push_back(score);
  }
  return scores;
}

SelectionScore ScoreSpec(const EstimatorSpec& spec,
                         std::span<const EvalTable> tables,
                         SelectionRule rule) {
  const SelectionRule rules[] = {rule};
  return ScoreSpec(spec, tables, rules).front();
}

std::vector<SelectionResult> SelectMany(std::span<const EstimatorSpec> specs,
                                        std::span<const EvalTable> tables,
                                        std::span<const SelectionRule> rules) {
  if (specs.empty()) Fail(ErrorCode::kInvalidArgument, "no candidate specs");
  std::vector<SelectionResult> results(rules.size());
  for (auto& result : results) result.scores.reserve(specs.size());
  for (const EstimatorSpec& spec : specs) {
    std::vector<SelectionScore> scores = ScoreSpec(spec, tables, rules);
    for (size_t r = 0; r < rules.size(); ++r) {
      results[r].scores.push_back(scores[r]);
    }
  }
  for (SelectionResult& result : results) {
    for (size_t j = 1; j < specs.size(); ++j) {
      if (Better(result.scores[j], specs[j].map.lambda,
                 result.scores[result.chosen],
                 specs[result.chosen].map.lambda)) {
        result.chosen = j;
      }
    }
  }
  return results;
}

SelectionResult Select(std::span<const EstimatorSpec> specs,
                       std::span<const EvalTable> tables, SelectionRule rule) {
  const SelectionRule rules[] = {rule};
  return std::move(SelectMany(specs, tables, rules).front());
}

size_t OracleSelect(std::span<const double> estimates, double truth) {
  if (estimates.empty()) Fail(ErrorCode::kInvalidArgument, "no candidates");
  size_t best = 0;
  double best_err = kInfinity;
  for (size_t j = 0; j < estimates.size(); ++j) {
    const double err = (estimates[j] - truth) * (estimates[j] - truth);
    if (err < best_err) {
      best_err = err;
      best = j;
    }
  }
  return best;
}

std::vector<size_t> OracleSelect(
    const std::vector<std::vector<double>>& estimates, double truth) {
  std::vector<size_t> chosen;
  chosen.reserve(estimates.size());
  for (const auto& row : estimates) chosen.push_back(OracleSelect(row, truth));
  return chosen;
}

}  // namespace ope
