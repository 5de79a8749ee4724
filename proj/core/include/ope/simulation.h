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

#ifndef OPE_SIMULATION_H_
#define OPE_SIMULATION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ope/data.h"
#include "ope/policy.h"

namespace ope {

// n logged samples: a context drawn uniformly with replacement from `data`,
// an action drawn from the logging policy and a reward with mean
// eta(x, a). Deterministic mode uses r = eta (= 1{a = y*} for labels);
// stochastic mode draws r ~ Bernoulli(eta).
std::vector<LoggedSample> SupervisedToBandit(const FullInfoDataset& data,
                                             const Policy& logging, size_t n,
                                             RewardMode mode, uint64_t seed);

// Contiguous partitions of sizes floor(f_j * n); the rounding remainder goes
// to the last one. Fractions must be nonnegative and sum to 1, else
// BadFractions.
std::vector<std::vector<LoggedSample>> SplitBanditData(
    std::span<const LoggedSample> samples, std::span<const double> fractions);

// Gaussian class clusters: labels uniform over k classes, features
// centroid[y] + noise * N(0, I) with centroids drawn from N(0, separation^2).
struct SyntheticSpec {
  size_t num_rows = 2000;
  int num_actions = 4;
  int feature_dim = 8;
  double separation = 1.0;
  double noise = 1.0;
  uint64_t seed = 0;
};

FullInfoDataset MakeSyntheticDataset(const SyntheticSpec& spec);

}  // namespace ope

#endif  // OPE_SIMULATION_H_
