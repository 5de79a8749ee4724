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

#include "ope/policy.h"

#include <cmath>
#include <string>

#include "ope/error.h"

namespace ope {

std::vector<double> Policy::Distribution(const Context& x) const {
  std::vector<double> out(num_actions());
  Distribution(x, out);
  return out;
}

double Policy::Probability(const Context& x, int action) const {
  if (action < 0 || action >= num_actions()) {
    Fail(ErrorCode::kIndexOutOfRange,
         "action " + std::to_string(action) + " outside policy support");
  }
  return Distribution(x)[action];
}

void ValidateDistribution(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) {
      Fail(ErrorCode::kInvalidArgument, "negative or NaN probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(ErrorCode::kInvalidArgument,
         "probabilities sum to " + std::to_string(total));
  }
}

TabularPolicy::TabularPolicy(
    int num_actions, std::unordered_map<int64_t, std::vector<double>> table)
    : num_actions_(num_actions), table_(std::move(table)) {
  if (num_actions_ < 1) {
    Fail(ErrorCode::kInvalidArgument, "policy needs at least one action");
  }
  for (const auto& [id, probs] : table_) {
    if (static_cast<int>(probs.size()) != num_actions_) {
      Fail(ErrorCode::kLengthMismatch,
           "tabular row for context " + std::to_string(id) + " has wrong size");
    }
    ValidateDistribution(probs);
  }
}

void TabularPolicy::Distribution(const Context& x,
                                 std::span<double> out) const {
  const auto it = table_.find(x.id);
  if (it == table_.end()) {
    Fail(ErrorCode::kIndexOutOfRange,
         "tabular policy has no row for context " + std::to_string(x.id));
  }
  std::copy(it->second.begin(), it->second.end(), out.begin());
}

UniformPolicy::UniformPolicy(int num_actions) : num_actions_(num_actions) {
  if (num_actions_ < 1) {
    Fail(ErrorCode::kInvalidArgument, "policy needs at least one action");
  }
}

void UniformPolicy::Distribution(const Context&, std::span<double> out) const {
  const double p = 1.0 / num_actions_;
  for (double& v : out) v = p;
}

double ImportanceWeight(const Policy& target, const LoggedSample& sample) {
  const double pi = target.Probability(sample.context, sample.action);
  if (sample.propensity <= 0.0) {
    if (pi > 0.0) {
      Fail(ErrorCode::kAbsoluteContinuityViolation,
           "zero propensity on context " + std::to_string(sample.context.id) +
               " action " + std::to_string(sample.action) +
               " where the target has positive mass");
    }
    return 0.0;
  }
  return pi / sample.propensity;
}

std::vector<ContinuityViolation> CheckAbsoluteContinuity(
    const Policy& target, const Policy& logging,
    std::span<const Context> contexts) {
  if (target.num_actions() != logging.num_actions()) {
    Fail(ErrorCode::kLengthMismatch, "policies disagree on the action count");
  }
  std::vector<ContinuityViolation> violations;
  std::vector<double> pi(target.num_actions());
  std::vector<double> mu(logging.num_actions());
  for (const Context& x : contexts) {
    target.Distribution(x, pi);
    logging.Distribution(x, mu);
    for (int a = 0; a < target.num_actions(); ++a) {
      if (pi[a] > 0.0 && mu[a] <= 0.0) violations.push_back({x.id, a});
    }
  }
  return violations;
}

double TruePolicyValue(const Policy& target, const FullInfoDataset& data,
                       RewardMode mode) {
  if (data.size() == 0) Fail(ErrorCode::kEmptyDataset, "no contexts");
  std::vector<double> pi(target.num_actions());
  double total = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    target.Distribution(data.contexts[i], pi);
    double value = 0.0;
    for (int a = 0; a < target.num_actions(); ++a) {
      value += pi[a] * ExpectedReward(data, i, a, mode);
    }
    total += value;
  }
  return total / static_cast<double>(data.size());
}

}  // namespace ope
