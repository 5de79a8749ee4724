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

#ifndef OPE_MODEL_SELECTION_H_
#define OPE_MODEL_SELECTION_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ope/estimators.h"

namespace ope {

// Quantile with linear interpolation between order statistics
// (position p * (n - 1) in the sorted sample).
double Quantile(std::span<const double> values, double p);

// Candidate lambdas for a shrinkage kind: 30 geometric points between
// q05 and q95 of the weights (pessimistic, switch) or between
// 0.01 * q05^2 and 100 * q95^2 (optimistic), followed by 0 and +inf.
// Coincident points collapse, so equal weights give {w, 0, inf}. A zero
// lower endpoint is replaced by 1e-6 times the upper one.
std::vector<double> LambdaGrid(std::span<const double> weights,
                               ShrinkKind kind);

// Var_hat / n where Var_hat is the unbiased sample variance (the pairwise
// U-statistic). Two passes, O(n).
double SampleVarianceOfMean(std::span<const double> values);

enum class BiasMode { kDirect, kOptimistic, kPessimistic };
enum class Inflation { kNone, kTwoSe, kBernstein };

std::string_view BiasModeName(BiasMode mode);
std::string_view InflationName(Inflation inflation);
Inflation ParseInflation(std::string_view name);

// Confidence level used by the Bernstein / Hoeffding inflation.
inline constexpr double kBernsteinDelta = 0.05;

// Raw bias estimates for DRs with `map`:
//   direct       |mean_i (w_hat_i - w_i)(r_i - eta_hat_i)|
//   pessimistic  mean_i sum_a pi(a|x_i) |w_hat / w - 1|
//   optimistic   sqrt(T1 * T2), T1 = mean_i z_i (r_i - eta_hat_i)^2,
//                T2 = mean_i sum_a mu(a|x_i) (w_hat - w)^2 / z(x_i, a)
// The analytic modes need a table built with the logging policy. The
// optimistic mode throws ZeroWeightScheme when a pair with z = 0 carries
// nonzero (w_hat - w)^2.
double BiasEstimate(BiasMode mode, const EvalTable& table,
                    const WeightMap& map);

// The estimate inflated by twice its standard error or by the Bernstein /
// Hoeffding deviation at delta = 0.05. For the optimistic mode T1 and T2 are
// inflated separately before taking the square root of their product.
double BiasUpper(BiasMode mode, Inflation inflation, const EvalTable& table,
                 const WeightMap& map);

// One member theta of the candidate set: a predictor (by index into the
// tables passed to Select) and a weight map.
struct EstimatorSpec {
  size_t predictor = 0;
  WeightMap map;
};

struct SelectionScore {
  double bias_ub = 0.0;
  double variance_hat = 0.0;
  double objective = 0.0;  // bias_ub^2 + variance_hat
  double estimate = 0.0;
};

// How BiasUB is formed:
//   kDrsDirect    pointwise min of the three raw estimates
//   kDrsUpper     pointwise min of the three two-SE inflated estimates
//   kPessimistic  the raw pessimistic estimate alone (SWITCH's rule)
//   kDirect       the raw direct estimate alone
// Analytic modes that cannot be evaluated (no logging tables, or a zero
// regression weight) count as +inf inside the minimum.
enum class SelectionRule { kDrsDirect, kDrsUpper, kPessimistic, kDirect };

std::string_view SelectionRuleName(SelectionRule rule);
SelectionRule ParseSelectionRule(std::string_view name);

SelectionScore ScoreSpec(const EstimatorSpec& spec,
                         std::span<const EvalTable> tables,
                         SelectionRule rule);

// One score per rule, sharing the per-spec work.
std::vector<SelectionScore> ScoreSpec(const EstimatorSpec& spec,
                                      std::span<const EvalTable> tables,
                                      std::span<const SelectionRule> rules);

struct SelectionResult {
  size_t chosen = 0;
  std::vector<SelectionScore> scores;
};

// argmin over specs of the objective; ties go to the smaller bias_ub, then
// the smaller lambda, then the earlier spec.
SelectionResult Select(std::span<const EstimatorSpec> specs,
                       std::span<const EvalTable> tables, SelectionRule rule);

// Select under several rules at once; results follow the order of `rules`.
std::vector<SelectionResult> SelectMany(std::span<const EstimatorSpec> specs,
                                        std::span<const EvalTable> tables,
                                        std::span<const SelectionRule> rules);

// Index of the spec whose estimate is closest to the truth. `estimates`
// holds one value per spec for a single replicate; ties go to the earlier
// spec.
size_t OracleSelect(std::span<const double> estimates, double truth);

// Per-replicate oracle choice over estimates[replicate][spec].
std::vector<size_t> OracleSelect(
    const std::vector<std::vector<double>>& estimates, double truth);

}  // namespace ope

#endif  // OPE_MODEL_SELECTION_H_
