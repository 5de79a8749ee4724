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

#ifndef OPE_ESTIMATORS_H_
#define OPE_ESTIMATORS_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "ope/data.h"
#include "ope/policy.h"
#include "ope/reward_model.h"

namespace ope {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// kSwitch is the hard threshold w -> w * 1{w <= lambda} behind SWITCH-DR.
enum class ShrinkKind { kIdentity, kPessimistic, kOptimistic, kZero, kSwitch };

std::string_view ShrinkKindName(ShrinkKind kind);
ShrinkKind ParseShrinkKind(std::string_view name);

// min(lambda, w).
double ShrinkPessimistic(double w, double lambda);
// lambda * w / (w^2 + lambda), with the limits w at lambda = inf and 0 at
// lambda = 0.
double ShrinkOptimistic(double w, double lambda);

// A weight mapping w -> w_hat with 0 <= w_hat <= w. lambda may be +inf.
struct WeightMap {
  ShrinkKind kind = ShrinkKind::kIdentity;
  double lambda = kInfinity;

  double Apply(double w) const;
};

struct EstimateBreakdown {
  double value = 0.0;
  std::vector<double> terms;  // Z_i
  double dm_component = 0.0;
  double correction_component = 0.0;
};

// Everything the estimators and the bias bounds need from one
// (samples, target, predictor) triple, computed once and reused across a
// whole lambda grid.
struct EvalTable {
  int num_actions = 0;
  std::vector<double> dm;        // sum_a pi(a|x_i) eta_hat(x_i, a)
  std::vector<double> weight;    // w_i = pi(a_i|x_i) / mu_i
  std::vector<double> residual;  // r_i - eta_hat(x_i, a_i)
  // Row-major n x k tables, filled only when the logging policy is known.
  std::vector<double> target_probs;
  std::vector<double> logging_probs;
  // Regression weights of the predictor's scheme: z at the logged action
  // and, with the logging policy known, z(x_i, a) for every action.
  std::vector<double> sample_z;
  std::vector<double> action_z;

  size_t size() const { return dm.size(); }
  bool has_action_tables() const { return !logging_probs.empty(); }
};

// `logging` enables the analytic bias bounds. `scheme` overrides the
// predictor's own scheme for the z values (it carries the MRDR seed).
EvalTable BuildEvalTable(std::span<const LoggedSample> samples,
                         const Policy& target, const RewardPredictor& predictor,
                         const Policy* logging = nullptr,
                         const WeightScheme* scheme = nullptr);

// V_DM: Z_i = sum_a pi(a|x_i) eta_hat(x_i, a).
EstimateBreakdown DmEstimate(const EvalTable& table);
EstimateBreakdown DmEstimate(std::span<const LoggedSample> samples,
                             const Policy& target,
                             const RewardPredictor& predictor);

// V_DRs: Z_i = dm_i + w_hat(w_i) (r_i - eta_hat(x_i, a_i)). The identity
// map gives DR, and DR with the zero predictor is IPS. Self-normalization
// rescales only the correction weights, by n / sum_j w_hat(w_j); a zero sum
// drops the correction.
EstimateBreakdown DrsEstimate(const EvalTable& table, const WeightMap& map,
                              bool self_normalized = false);
EstimateBreakdown DrsEstimate(std::span<const LoggedSample> samples,
                              const Policy& target,
                              const RewardPredictor& predictor,
                              const WeightMap& map,
                              bool self_normalized = false);

// SWITCH-DR: the direct term over all actions plus the importance-weighted
// residual only where w_i <= tau. tau = inf gives DR and tau = 0 gives DM.
EstimateBreakdown SwitchDrEstimate(const EvalTable& table, double tau);
EstimateBreakdown SwitchDrEstimate(std::span<const LoggedSample> samples,
                                   const Policy& target,
                                   const RewardPredictor& predictor,
                                   double tau);

}  // namespace ope

#endif  // OPE_ESTIMATORS_H_
