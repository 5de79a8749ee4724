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

#ifndef OPE_POLICY_H_
#define OPE_POLICY_H_

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "ope/data.h"

namespace ope {

// A conditional distribution pi(a|x) over a finite action set. Queries are
// exact and side-effect free; implementations are immutable once built.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual int num_actions() const = 0;

  // Writes pi(.|x) into `out`, which must have num_actions() entries.
  virtual void Distribution(const Context& x, std::span<double> out) const = 0;

  std::vector<double> Distribution(const Context& x) const;
  double Probability(const Context& x, int action) const;
};

using PolicyPtr = std::shared_ptr<const Policy>;

// Explicit per-context probability tables keyed by context id.
class TabularPolicy : public Policy {
 public:
  TabularPolicy(int num_actions,
                std::unordered_map<int64_t, std::vector<double>> table);

  int num_actions() const override { return num_actions_; }
  using Policy::Distribution;
  void Distribution(const Context& x, std::span<double> out) const override;

 private:
  int num_actions_;
  std::unordered_map<int64_t, std::vector<double>> table_;
};

class UniformPolicy : public Policy {
 public:
  explicit UniformPolicy(int num_actions);

  int num_actions() const override { return num_actions_; }
  using Policy::Distribution;
  void Distribution(const Context& x, std::span<double> out) const override;

 private:
  int num_actions_;
};

// Throws unless `probs` is nonnegative and sums to 1 within 1e-9.
void ValidateDistribution(std::span<const double> probs);

// w = pi(a|x) / mu(a|x) using the propensity recorded on the sample.
// A zero propensity is only legal when the target puts no mass on the
// action; otherwise the logs violate absolute continuity.
double ImportanceWeight(const Policy& target, const LoggedSample& sample);

struct ContinuityViolation {
  int64_t context_id = 0;
  int action = 0;

  bool operator==(const ContinuityViolation&) const = default;
};

// Every (x, a) with pi(a|x) > 0 and mu(a|x) = 0. Empty means pi << mu.
std::vector<ContinuityViolation> CheckAbsoluteContinuity(
    const Policy& target, const Policy& logging,
    std::span<const Context> contexts);

// V(pi) = (1/N) sum_x sum_a pi(a|x) eta(x, a).
double TruePolicyValue(const Policy& target, const FullInfoDataset& data,
                       RewardMode mode);

}  // namespace ope

#endif  // OPE_POLICY_H_
