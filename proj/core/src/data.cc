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

#include "ope/data.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "ope/error.h"
#include "ope/random.h"

namespace ope {

std::string_view RewardModeName(RewardMode mode) {
  return mode == RewardMode::kDeterministic ? "deterministic" : "stochastic";
}

RewardMode ParseRewardMode(std::string_view name) {
  if (name == "deterministic") return RewardMode::kDeterministic;
  if (name == "stochastic") return RewardMode::kStochastic;
  Fail(ErrorCode::kInvalidArgument,
       "unknown reward mode '" + std::string(name) + "'");
}

void FullInfoDataset::Validate() const {
  if (num_actions < 1) {
    Fail(ErrorCode::kInvalidArgument, "dataset needs at least one action");
  }
  if (labels.size() != contexts.size()) {
    Fail(ErrorCode::kLengthMismatch, "labels and contexts differ in length");
  }
  if (!expected_rewards.empty() && expected_rewards.size() != contexts.size()) {
    Fail(ErrorCode::kLengthMismatch,
         "expected-reward table and contexts differ in length");
  }
  std::unordered_set<int64_t> ids;
  for (size_t i = 0; i < contexts.size(); ++i) {
    const Context& x = contexts[i];
    if (static_cast<int>(x.features.size()) != feature_dim) {
      Fail(ErrorCode::kInvalidArgument,
           "context " + std::to_string(x.id) + " has " +
               std::to_string(x.features.size()) + " features, expected " +
               std::to_string(feature_dim));
    }
    for (double f : x.features) {
      if (!std::isfinite(f)) {
        Fail(ErrorCode::kInvalidArgument,
             "non-finite feature in context " + std::to_string(x.id));
      }
    }
    if (labels[i] < 0 || labels[i] >= num_actions) {
      Fail(ErrorCode::kIndexOutOfRange,
           "label " + std::to_string(labels[i]) + " outside [0, " +
               std::to_string(num_actions) + ")");
    }
    if (!ids.insert(x.id).second) {
      Fail(ErrorCode::kInvalidArgument,
           "duplicate context id " + std::to_string(x.id));
    }
    if (!expected_rewards.empty()) {
      const auto& row = expected_rewards[i];
      if (static_cast<int>(row.size()) != num_actions) {
        Fail(ErrorCode::kLengthMismatch, "expected-reward row has wrong size");
      }
      for (double eta : row) {
        if (!(eta >= 0.0 && eta <= 1.0)) {
          Fail(ErrorCode::kInvalidArgument,
               "expected reward outside [0, 1]");
        }
      }
    }
  }
}

FullInfoDataset FullInfoDataset::Subset(std::span<const size_t> indices) const {
  FullInfoDataset out;
  out.num_actions = num_actions;
  out.feature_dim = feature_dim;
  out.contexts.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (size_t i : indices) {
    if (i >= contexts.size()) {
      Fail(ErrorCode::kIndexOutOfRange, "subset index out of range");
    }
    out.contexts.push_back(contexts[i]);
    out.labels.push_back(labels[i]);
    if (!expected_rewards.empty()) {
      out.expected_rewards.push_back(expected_rewards[i]);
    }
  }
  return out;
}

double ExpectedReward(const FullInfoDataset& data, size_t row, int action,
                      RewardMode mode) {
  if (!data.expected_rewards.empty()) return data.expected_rewards[row][action];
  const bool correct = data.labels[row] == action;
  if (mode == RewardMode::kDeterministic) return correct ? 1.0 : 0.0;
  return correct ? 0.75 : 0.25;
}

DatasetSplit SplitDataset(const FullInfoDataset& data, double first_fraction,
                          uint64_t seed) {
  if (!(first_fraction >= 0.0 && first_fraction <= 1.0)) {
    Fail(ErrorCode::kBadFractions, "split fraction must lie in [0, 1]");
  }
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  // Fisher-Yates with the portable integer sampler.
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformInt(i)]);
  }
  const auto cut = static_cast<size_t>(
      std::floor(first_fraction * static_cast<double>(data.size()) + 1e-9));
  std::span<const size_t> all(order);
  return {data.Subset(all.first(cut)), data.Subset(all.subspan(cut))};
}

}  // namespace ope
