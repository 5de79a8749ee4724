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

#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "ope/error.h"
#include "ope/estimators.h"
#include "ope/features.h"
#include "ope/learning.h"
#include "ope/policy.h"
#include "ope/policy_kit.h"
#include "ope/random.h"
#include "ope/simulation.h"

namespace ope {
namespace {

// Five logged samples over three actions with non-uniform propensities.
std::vector<LoggedSample> FiveSamples() {
  return {{{0, {0.5, -1.0}}, 0, 1.0, 0.5},
          {{1, {1.2, 0.3}}, 2, 0.0, 0.2},
          {{2, {-0.4, 0.9}}, 1, 1.0, 0.3},
          {{3, {0.0, 0.0}}, 2, 1.0, 0.6},
          {{4, {2.0, -0.5}}, 1, 0.0, 0.25}};
}

RewardPredictor SomePredictor() {
  Eigen::VectorXd w(9);
  w << 0.1, -0.1, 0.4, 0.2, 0.1, 0.3, -0.2, 0.0, 0.5;
  return RewardPredictor(3, 2, w, 1.0, SchemeKind::kConst1);
}

LearningProblem MakeProblem(std::vector<LoggedSample> samples,
                            RewardPredictor predictor) {
  return LearningProblem(std::move(samples), std::move(predictor),
                         std::make_shared<JointFeaturizer>(3, 2));
}

Eigen::VectorXd RandomVector(Rng& rng, int dim, double scale) {
  Eigen::VectorXd u(dim);
  for (int j = 0; j < dim; ++j) u[j] = scale * rng.Normal();
  return u;
}

TEST(ShrinkDerivative, Examples) {
  EXPECT_EQ(ShrinkDerivative(WeightMap{ShrinkKind::kOptimistic, kInfinity}, 3.0),
            1.0);
  EXPECT_EQ(ShrinkDerivative(WeightMap{ShrinkKind::kOptimistic, 0.0}, 3.0), 0.0);
  // lambda (lambda - w^2) / (w^2 + lambda)^2 at w = 1, lambda = 3.
  EXPECT_DOUBLE_EQ(ShrinkDerivative(WeightMap{ShrinkKind::kOptimistic, 3.0}, 1.0),
                   3.0 * 2.0 / 16.0);
  EXPECT_EQ(ShrinkDerivative(WeightMap{ShrinkKind::kPessimistic, 2.0}, 1.0), 1.0);
  EXPECT_EQ(ShrinkDerivative(WeightMap{ShrinkKind::kPessimistic, 2.0}, 3.0), 0.0);
}

TEST(LearningObjective, RegularizerOnlyWithZeroPredictorAtLambdaZero) {
  const LearningProblem p = MakeProblem(FiveSamples(), RewardPredictor::Zero(3, 2));
  Rng rng(1);
  const Eigen::VectorXd u = RandomVector(rng, p.dim(), 1.0);
  const LearningSpec spec{WeightMap{ShrinkKind::kOptimistic, 0.0}, 0.3};
  EXPECT_NEAR(p.Objective(u, spec), 0.3 * u.squaredNorm(), 1e-14);
}

TEST(LearningObjective, UniformPolicyUnderUniformLoggingIsMeanReward) {
  std::vector<LoggedSample> samples = {{{0, {0.1, 0.2}}, 0, 1.0, 1.0 / 3.0},
                                       {{1, {0.3, -0.2}}, 1, 0.0, 1.0 / 3.0},
                                       {{2, {-1.0, 0.4}}, 2, 0.5, 1.0 / 3.0}};
  const LearningProblem p = MakeProblem(samples, RewardPredictor::Zero(3, 2));
  const LearningSpec spec{WeightMap{}, 0.0};
  EXPECT_NEAR(p.Objective(Eigen::VectorXd::Zero(p.dim()), spec), -0.5, 1e-15);
}

TEST(LearningObjective, GammaTermIsAdditive) {
  const LearningProblem p = MakeProblem(FiveSamples(), SomePredictor());
  Rng rng(2);
  const Eigen::VectorXd u = RandomVector(rng, p.dim(), 0.7);
  LearningSpec spec{WeightMap{ShrinkKind::kPessimistic, 1.0}, 0.01};
  const double base = p.Objective(u, spec);
  spec.gamma = 0.02;
  EXPECT_NEAR(p.Objective(u, spec) - base, 0.01 * u.squaredNorm(), 1e-14);
}

TEST(LearningObjective, EndpointsMatchDmAndDr) {
  const auto samples = FiveSamples();
  const RewardPredictor predictor = SomePredictor();
  const LearningProblem p = MakeProblem(samples, predictor);
  Rng rng(3);
  const Eigen::VectorXd u = RandomVector(rng, p.dim(), 0.8);
  const SoftmaxLinearPolicy pi(u, std::make_shared<JointFeaturizer>(3, 2));
  const double gamma_term = 0.05 * u.squaredNorm();
  for (ShrinkKind kind : {ShrinkKind::kOptimistic, ShrinkKind::kPessimistic}) {
    EXPECT_NEAR(p.Objective(u, {WeightMap{kind, kInfinity}, 0.05}),
                -DrsEstimate(samples, pi, predictor, WeightMap{}).value +
                    gamma_term,
                1e-13);
    EXPECT_NEAR(p.Objective(u, {WeightMap{kind, 0.0}, 0.05}),
                -DmEstimate(samples, pi, predictor).value + gamma_term, 1e-13);
  }
}

// The joint features plus the same per-context vector on every action.
class ShiftedFeaturizer : public ActionFeaturizer {
 public:
  int num_actions() const override { return 3; }
  int dim() const override { return base_.dim(); }
  void Featurize(const Context& x, int action,
                 std::span<double> out) const override {
    base_.Featurize(x, action, out);
    for (size_t j = 0; j < out.size(); ++j) {
      out[j] += x.features[0] * static_cast<double>(j % 4) - 0.3 * x.features[1];
    }
  }

 private:
  JointFeaturizer base_{3, 2};
};

TEST(LearningObjective, InvariantToPerContextFeatureShifts) {
  const auto samples = FiveSamples();
  const LearningProblem plain = MakeProblem(samples, SomePredictor());
  const LearningProblem shifted(samples, SomePredictor(),
                                std::make_shared<ShiftedFeaturizer>());
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd u = RandomVector(rng, plain.dim(), 0.5);
    const LearningSpec spec{WeightMap{ShrinkKind::kOptimistic, 1.0}, 0.01};
    EXPECT_NEAR(plain.Objective(u, spec), shifted.Objective(u, spec), 1e-12);
  }
}

TEST(LearningGradient, MatchesFiniteDifferences) {
  const LearningProblem p = MakeProblem(FiveSamples(), SomePredictor());
  Rng rng(5);
  for (ShrinkKind kind : {ShrinkKind::kOptimistic, ShrinkKind::kPessimistic}) {
    for (double lambda : {0.0, 1.0, kInfinity}) {
      const LearningSpec spec{WeightMap{kind, lambda}, 0.01};
      for (int point = 0; point < 20; ++point) {
        const Eigen::VectorXd u = RandomVector(rng, p.dim(), 1.0);
        const Eigen::VectorXd g = p.Gradient(u, spec);
        EXPECT_LE(GradientRelativeError(g, FiniteDifferenceGradient(p, u, spec)),
                  1e-5)
            << ShrinkKindName(kind) << " lambda " << lambda;
        Eigen::VectorXd g2;
        EXPECT_EQ(p.Evaluate(u, spec, &g2), p.Objective(u, spec));
        EXPECT_EQ(g2, g);
      }
    }
  }
}

TEST(LearningGradient, SymmetricFeaturesGiveZeroGradientAtOrigin) {
  // Every action sees the same features, the predictor is action-blind and
  // logging is uniform, so the value term is flat at u = 0 by symmetry.
  std::vector<LoggedSample> samples;
  for (int i = 0; i < 6; ++i) {
    samples.push_back({{i, {0.3 * i, 1.0 - 0.2 * i}}, i % 3, 0.0, 1.0 / 3.0});
  }
  for (auto& s : samples) s.reward = 0.4;
  Eigen::VectorXd w(9);
  w << 0.0, 0.0, 0.4, 0.0, 0.0, 0.4, 0.0, 0.0, 0.4;
  const LearningProblem p =
      MakeProblem(samples, RewardPredictor(3, 2, w, 0.0, SchemeKind::kConst1));
  const Eigen::VectorXd g =
      p.Gradient(Eigen::VectorXd::Zero(p.dim()), {WeightMap{}, 0.5});
  EXPECT_LE(g.cwiseAbs().maxCoeff(), 1e-15);

  Rng rng(6);
  const Eigen::VectorXd u = RandomVector(rng, p.dim(), 1.0);
  const LearningSpec zero_value{WeightMap{ShrinkKind::kOptimistic, 0.0}, 0.5};
  const LearningProblem blind = MakeProblem(samples, RewardPredictor::Zero(3, 2));
  EXPECT_LE((blind.Gradient(u, zero_value) - 2.0 * 0.5 * u).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(TrainPolicy, LargeGammaKeepsParametersNearZero) {
  const LearningProblem p = MakeProblem(FiveSamples(), SomePredictor());
  const TrainResult r = TrainPolicy(p, {WeightMap{}, 1e4});
  EXPECT_LE(r.u.norm(), 1e-3);
}

TEST(TrainPolicy, OneActionProblemLearnsNothing) {
  std::vector<LoggedSample> samples = {{{0, {1.0}}, 0, 1.0, 1.0},
                                       {{1, {-2.0}}, 0, 0.0, 1.0}};
  const LearningProblem p(samples, RewardPredictor::Zero(1, 1),
                          std::make_shared<JointFeaturizer>(1, 1));
  const TrainResult r = TrainPolicy(p, {WeightMap{}, 0.1});
  EXPECT_LE(r.u.norm(), 1e-3);
  EXPECT_TRUE(r.converged);
}

TEST(TrainPolicy, TraceNeverIncreases) {
  const FullInfoDataset data = MakeSyntheticDataset(
      {.num_rows = 200, .num_actions = 3, .feature_dim = 2, .seed = 8});
  const UniformPolicy logging(3);
  const auto samples =
      SupervisedToBandit(data, logging, 150, RewardMode::kDeterministic, 9);
  const LearningProblem p = MakeProblem(samples, RewardPredictor::Zero(3, 2));
  for (double lambda : {0.1, 10.0, kInfinity}) {
    const TrainResult r = TrainPolicy(
        p, {WeightMap{ShrinkKind::kOptimistic, lambda}, 1e-3},
        {.step = 1.0, .max_iterations = 300});
    ASSERT_FALSE(r.trace.empty());
    for (size_t i = 1; i < r.trace.size(); ++i) {
      EXPECT_LE(r.trace[i], r.trace[i - 1]);
    }
    EXPECT_LT(r.trace.back(),
              p.Objective(Eigen::VectorXd::Zero(p.dim()),
                          {WeightMap{ShrinkKind::kOptimistic, lambda}, 1e-3}));
  }
}

TEST(ScorerParameters, RoundTrip) {
  Rng rng(10);
  const Eigen::VectorXd u = RandomVector(rng, 12, 1.0);
  const LinearScorer scorer = ScorerFromParameters(u, 3, 3);
  EXPECT_EQ(ParametersFromScorer(scorer), u);
  const SoftmaxLinearPolicy softmax(u, std::make_shared<JointFeaturizer>(3, 3));
  const Context x{0, {0.2, -0.7, 1.1}};
  const auto p = softmax.Distribution(x);
  const auto scores = scorer.Scores(x);
  double z = 0.0;
  for (double s : scores) z += std::exp(s);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(p[a], std::exp(scores[a]) / z, 1e-14);
}

std::shared_ptr<TabularPolicy> LabelPolicy(const FullInfoDataset& data,
                                           double on_label) {
  std::unordered_map<int64_t, std::vector<double>> table;
  for (size_t i = 0; i < data.size(); ++i) {
    std::vector<double> probs(data.num_actions,
                              (1.0 - on_label) / (data.num_actions - 1));
    probs[data.labels[i]] = on_label;
    table[data.contexts[i].id] = probs;
  }
  return std::make_shared<TabularPolicy>(data.num_actions, std::move(table));
}

TEST(SelectLearnedPolicy, Examples) {
  const FullInfoDataset data = MakeSyntheticDataset(
      {.num_rows = 300, .num_actions = 3, .feature_dim = 2, .seed = 12});
  const auto uniform = std::make_shared<UniformPolicy>(3);
  const PolicyPtr better = LabelPolicy(data, 0.9);
  ASSERT_GE(TruePolicyValue(*better, data, RewardMode::kDeterministic) -
                TruePolicyValue(*uniform, data, RewardMode::kDeterministic),
            0.2);
  const std::vector<RewardPredictor> predictors = {RewardPredictor::Zero(3, 2)};

  const auto validation =
      SupervisedToBandit(data, *uniform, 100, RewardMode::kDeterministic, 1);
  const std::vector<PolicyPtr> single = {better};
  EXPECT_EQ(SelectLearnedPolicy(single, validation, predictors, uniform.get()),
            0u);
  const std::vector<PolicyPtr> twins = {better, better};
  EXPECT_EQ(SelectLearnedPolicy(twins, validation, predictors, uniform.get()),
            0u);

  const std::vector<PolicyPtr> pair = {uniform, better};
  int wins = 0;
  for (uint64_t trial = 0; trial < 100; ++trial) {
    const auto samples = SupervisedToBandit(
        data, *uniform, 200, RewardMode::kStochastic, DeriveSeed(77, trial));
    std::vector<double> values;
    wins += SelectLearnedPolicy(pair, samples, predictors, uniform.get(),
                                &values) == 1;
    EXPECT_EQ(values.size(), 2u);
  }
  EXPECT_GE(wins, 95);
}

}  // namespace
}  // namespace ope
