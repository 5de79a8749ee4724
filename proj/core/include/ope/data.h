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

#ifndef OPE_DATA_H_
#define OPE_DATA_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ope {

// A context x. The id keys every per-context pseudo-random quantity
// (softening noise, slate epsilon) so those are reproducible from a seed.
struct Context {
  int64_t id = 0;
  std::vector<double> features;
};

// One logged interaction (x, a, r, mu(a|x)).
struct LoggedSample {
  Context context;
  int action = 0;
  double reward = 0.0;
  double propensity = 1.0;
};

enum class RewardMode { kDeterministic, kStochastic };

std::string_view RewardModeName(RewardMode mode);
RewardMode ParseRewardMode(std::string_view name);

// Fully labelled multiclass data. Rewards are derived from labels unless an
// explicit expected-reward table eta(x, a) is attached.
struct FullInfoDataset {
  int num_actions = 0;
  int feature_dim = 0;
  std::vector<Context> contexts;
  std::vector<int> labels;
  // Optional, one row of num_actions entries in [0, 1] per context.
  std::vector<std::vector<double>> expected_rewards;

  size_t size() const { return contexts.size(); }

  // Checks labels, feature lengths, finiteness and id uniqueness.
  void Validate() const;

  // Rows at `indices`, in that order, keeping their context ids.
  FullInfoDataset Subset(std::span<const size_t> indices) const;
};

// Expected reward eta(x_row, action). Label-derived rewards are 1{a = y*}
// in deterministic mode and 0.75 * 1{a = y*} + 0.25 * 1{a != y*} in
// stochastic mode. An attached table is returned as is in both modes.
double ExpectedReward(const FullInfoDataset& data, size_t row, int action,
                      RewardMode mode);

// Rows [0, N*fraction) and the rest, after a seeded shuffle.
struct DatasetSplit {
  FullInfoDataset first;
  FullInfoDataset second;
};
DatasetSplit SplitDataset(const FullInfoDataset& data, double first_fraction,
                          uint64_t seed);

}  // namespace ope

#endif  // OPE_DATA_H_
