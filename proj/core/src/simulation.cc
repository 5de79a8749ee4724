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

#include "ope/simulation.h"

#include <cmath>
#include <string>

#include "ope/error.h"
#include "ope/random.h"

namespace ope {

std::vector<LoggedSample> SupervisedToBandit(const FullInfoDataset& data,
                                             const Policy& logging, size_t n,
                                             RewardMode mode, uint64_t seed) {
  if (data.size() == 0) Fail(ErrorCode::kEmptyDataset, "no contexts");
  if (logging.num_actions() != data.num_actions) {
    Fail(ErrorCode::kInvalidArgument, "logging policy action count differs");
  }
  Rng rng(seed);
  std::vector<LoggedSample> out;
  out.reserve(n);
  std::vector<double> mu(data.num_actions);
  for (size_t i = 0; i < n; ++i) {
    const size_t row = rng.UniformInt(data.size());
    const Context& x = data.contexts[row];
    logging.Distribution(x, mu);
    const int action = rng.Categorical(mu);
    const double eta = ExpectedReward(data, row, action, mode);
    double reward = eta;
    if (mode == RewardMode::kStochastic) reward = rng.Bernoulli(eta) ? 1.0 : 0.0;
    out.push_back({x, action, reward, mu[action]});
  }
  return out;
}

std::vector<std::vector<LoggedSample>> SplitBanditData(
    std::span<const LoggedSample> samples, std::span<const double> fractions) {
  if (fractions.empty()) Fail(ErrorCode::kBadFractions, "no fractions");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) Fail(ErrorCode::kBadFractions, "negative fraction");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(ErrorCode::kBadFractions,
         "fractions sum to " + std::to_string(total) + ", not 1");
  }
  const double n = static_cast<double>(samples.size());
  std::vector<std::vector<LoggedSample>> parts(fractions.size());
  size_t begin = 0;
  for (size_t j = 0; j < fractions.size(); ++j) {
    size_t size = j + 1 == fractions.size()
                      ? samples.size() - begin
                      : static_cast<size_t>(std::floor(fractions[j] * n + 1e-9));
    size = std::min(size, samples.size() - begin);
    parts[j].assign(samples.begin() + begin, samples.begin() + begin + size);
    begin += size;
  }
  return parts;
}

FullInfoDataset MakeSyntheticDataset(const SyntheticSpec& spec) {
  if (spec.num_actions < 1 || spec.feature_dim < 1 || spec.num_rows == 0) {
    Fail(ErrorCode::kInvalidArgument, "bad synthetic dataset shape");
  }
  Rng rng(spec.seed);
  std::vector<std::vector<double>> centroids(
      spec.num_actions, std::vector<double>(spec.feature_dim));
  for (auto& c : centroids) {
    for (double& v : c) v = spec.separation * rng.Normal();
  }
  FullInfoDataset data;
  data.num_actions = spec.num_actions;
  data.feature_dim = spec.feature_dim;
  data.contexts.reserve(spec.num_rows);
  data.labels.reserve(spec.num_rows);
  for (size_t i = 0; i < spec.num_rows; ++i) {
    const int y = static_cast<int>(rng.UniformInt(spec.num_actions));
    Context x;
    x.id = static_cast<int64_t>(i);
    x.features.resize(spec.feature_dim);
    for (int j = 0; j < spec.feature_dim; ++j) {
      x.features[j] = centroids[y][j] + spec.noise * rng.Normal();
    }
    data.contexts.push_back(std::move(x));
    data.labels.push_back(y);
  }
  return data;
}

}  // namespace ope
