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

#ifndef OPE_TESTS_FIXTURES_H_
#define OPE_TESTS_FIXTURES_H_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ope/data.h"
#include "ope/policy.h"
#include "ope/reward_model.h"
#include "ope/slate.h"

namespace ope::testing {

// Three contexts, three actions, a fixed reward table and hand-written
// target and logging tables. Small enough to enumerate every draw sequence.
struct EnumerableInstance {
  FullInfoDataset data;
  std::shared_ptr<TabularPolicy> target;
  std::shared_ptr<TabularPolicy> logging;
  RewardPredictor predictor = RewardPredictor::Zero(3, 2);
};

EnumerableInstance MakeEnumerableInstance();

// One logged draw and its probability: a context uniformly at random, an
// action from the logging policy, reward eta(x, a).
struct WeightedSample {
  double prob = 0.0;
  LoggedSample sample;
};
std::vector<WeightedSample> SingleDraws(const EnumerableInstance& inst);

// Exact E[f] and Var[f] over all ordered n-tuples of independent draws.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments EnumerateMoments(
    std::span<const WeightedSample> draws, int n,
    const std::function<double(std::span<const LoggedSample>)>& f);

// A two-context slate problem with l = 2, m = 3, the constructed basis,
// epsilon-greedy logging and rewards linear in the l-hot action.
struct SlateInstance {
  SlateBasis basis = SlateBasis::Build(2, 3);
  std::vector<SlateContextState> states;
  std::vector<Eigen::VectorXd> eta;      // true reward coefficients
  std::vector<Eigen::VectorXd> eta_hat;  // predictor coefficients
};

SlateInstance MakeSlateInstance();

// A uniformly random context and a basis column drawn from its logging
// distribution, with reward eta . a.
struct WeightedSlateSample {
  double prob = 0.0;
  LoggedSlateSample sample;
};
std::vector<WeightedSlateSample> SingleSlateDraws(const SlateInstance& inst);

// Pseudo-inverse weights of every basis column computed from an SVD of
// Gamma = B diag(mu) B^T, independently of the closed form.
std::vector<double> ExplicitPseudoInverseWeights(const SlateBasis& basis,
                                                 const SlateContextState& state);

}  // namespace ope::testing

#endif  // OPE_TESTS_FIXTURES_H_
