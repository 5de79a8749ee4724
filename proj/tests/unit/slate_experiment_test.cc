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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ope/error.h"
#include "ope/slate.h"
#include "ope/slate_experiment.h"

namespace ope {
namespace {

SlateEnvironment SmallEnvironment() {
  const RelevanceData rel = MakeSyntheticRelevance(
      {.num_queries = 120, .docs_per_query = 10, .feature_dim = 6, .seed = 3});
  return BuildSlateEnvironment(
      rel, {.slate_length = 2, .num_items = 5, .scorer_fraction = 0.2,
            .seed = 4});
}

TEST(SyntheticRelevance, ShapeAndRange) {
  const RelevanceData rel = MakeSyntheticRelevance(
      {.num_queries = 10, .docs_per_query = 7, .feature_dim = 3, .seed = 1});
  ASSERT_EQ(rel.queries.size(), 10u);
  EXPECT_EQ(rel.feature_dim, 3);
  for (const SlateQuery& q : rel.queries) {
    EXPECT_EQ(q.relevance.size(), 7u);
    EXPECT_EQ(q.features.rows(), 7);
    EXPECT_EQ(q.features.cols(), 3);
    for (double r : q.relevance) {
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 4.0);
      EXPECT_EQ(r, std::round(r));
    }
  }
}

TEST(SlateEnvironment, ContextsArePreparedInRankSpace) {
  const SlateEnvironment env = SmallEnvironment();
  EXPECT_EQ(env.basis.size(), 9);
  EXPECT_EQ(env.contexts.size(), 96u);  // 120 minus the scorer share
  const auto eps = DefaultEpsilons();
  for (const SlateContext& c : env.contexts) {
    EXPECT_EQ(c.relevance.size(), 5u);
    EXPECT_EQ(c.target.size(), 2u);
    EXPECT_NE(std::find(eps.begin(), eps.end(), c.epsilon), eps.end());
    EXPECT_EQ(c.state.mu, EpsilonGreedyDistribution(9, c.epsilon));
    EXPECT_NEAR(c.target_ndcg, Ndcg(c.relevance, c.target), 1e-15);
    EXPECT_LE(c.state.residual, kSpanTolerance);
    EXPECT_EQ(env.contexts[env.index_of.at(c.id)].id, c.id);
  }
}

TEST(SlateEnvironment, RejectsTooFewFeatures) {
  const RelevanceData rel = MakeSyntheticRelevance(
      {.num_queries = 10, .docs_per_query = 8, .feature_dim = 1, .seed = 1});
  EXPECT_THROW(BuildSlateEnvironment(rel, {.slate_length = 2, .num_items = 5}),
               OpeError);
}

TEST(SlateTruth, AveragesTargetNdcg) {
  const SlateEnvironment env = SmallEnvironment();
  double mean = 0.0;
  for (const auto& c : env.contexts) mean += c.target_ndcg;
  mean /= static_cast<double>(env.contexts.size());
  EXPECT_NEAR(SlateTruth(env, RewardMode::kDeterministic), mean, 1e-12);
  EXPECT_NEAR(SlateTruth(env, RewardMode::kStochastic), 0.25 + 0.5 * mean,
              1e-12);
}

TEST(SimulateSlateLogs, SeededAndConsistent) {
  const SlateEnvironment env = SmallEnvironment();
  const auto a = SimulateSlateLogs(env, 300, RewardMode::kDeterministic, 8);
  const auto b = SimulateSlateLogs(env, 300, RewardMode::kDeterministic, 8);
  ASSERT_EQ(a.size(), 300u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].context_id, b[i].context_id);
    EXPECT_EQ(a[i].basis_index, b[i].basis_index);
    const SlateContext& c = env.contexts[env.index_of.at(a[i].context_id)];
    EXPECT_EQ(a[i].propensity, c.state.mu[a[i].basis_index]);
    EXPECT_EQ(a[i].epsilon, c.epsilon);
    EXPECT_NEAR(a[i].reward,
                Ndcg(c.relevance, env.basis.tuples()[a[i].basis_index]),
                1e-15);
  }
  for (const auto& s :
       SimulateSlateLogs(env, 100, RewardMode::kStochastic, 9)) {
    EXPECT_TRUE(s.reward == 0.0 || s.reward == 1.0);
  }
}

TEST(SlatePredictor, CoefficientsScoreSlatesAdditively) {
  const SlateEnvironment env = SmallEnvironment();
  Eigen::VectorXd w(6);
  w << 0.3, -0.2, 0.1, 0.05, 0.4, -0.1;  // two blocks of two features + b_j
  const SlatePredictor p(2, {1, 4}, w);
  const SlateContext& c = env.contexts.front();
  const Eigen::VectorXd eta = p.Coefficients(c);
  for (const SlateTuple& t : env.basis.tuples()) {
    double expected = 0.0;
    for (int j = 0; j < 2; ++j) {
      expected += w[3 * j] * c.features(t[j], 1) +
                  w[3 * j + 1] * c.features(t[j], 4) + w[3 * j + 2];
    }
    EXPECT_NEAR(eta.dot(LhotEncode(t, 5)), expected, 1e-14);
  }
}

TEST(FitSlatePredictor, RecoversLinearRewards) {
  const SlateEnvironment env = SmallEnvironment();
  Eigen::VectorXd truth(6);
  truth << 0.2, -0.1, 0.3, 0.15, 0.05, 0.0;
  const SlatePredictor oracle(2, {0, 2}, truth);
  auto samples = SimulateSlateLogs(env, 2000, RewardMode::kDeterministic, 5);
  for (auto& s : samples) {
    const SlateContext& c = env.contexts[env.index_of.at(s.context_id)];
    s.reward = oracle.Coefficients(c).dot(env.basis.matrix().col(s.basis_index));
  }
  const SlatePredictor fit = FitSlatePredictor(env, samples, {0, 2}, 1e-9);
  for (const SlateContext& c : env.contexts) {
    EXPECT_LE((fit.Coefficients(c) - oracle.Coefficients(c))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-6);
  }
}

TEST(TopCorrelatedFeatures, SortedAndBounded) {
  const SlateEnvironment env = SmallEnvironment();
  const auto samples = SimulateSlateLogs(env, 500, RewardMode::kDeterministic, 6);
  const auto top = TopCorrelatedFeatures(env, samples, 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_TRUE(std::is_sorted(top.begin(), top.end()));
  EXPECT_EQ(TopCorrelatedFeatures(env, samples, 50).size(), 6u);
}

TEST(RunSlateExperiment, DeterministicAndOracleDominates) {
  const SlateEnvironment env = SmallEnvironment();
  SlateRunOptions options;
  options.sample_sizes = {200};
  options.replicates = 4;
  options.seed = 12;
  const auto one = RunSlateExperiment(env, options, 1);
  const auto three = RunSlateExperiment(env, options, 3);
  ASSERT_EQ(one.size(), 2u * 2u * 4u);  // modes x predictors x estimators
  for (size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].estimator, three[i].estimator);
    EXPECT_EQ(one[i].mse, three[i].mse);
  }
  for (size_t i = 0; i < one.size(); i += 4) {
    EXPECT_EQ(one[i].estimator, "DM");
    EXPECT_EQ(one[i + 3].estimator, "DRs-PI-oracle");
    EXPECT_LE(one[i + 3].mse, one[i].mse);
    EXPECT_LE(one[i + 3].mse, one[i + 1].mse);
  }
}

}  // namespace
}  // namespace ope
