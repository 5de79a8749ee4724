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

#ifndef OPE_SLATE_EXPERIMENT_H_
#define OPE_SLATE_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "ope/data.h"
#include "ope/slate.h"

namespace ope {

// Judged documents of one query: relevance in {0, ..., 4} and a feature row
// per document.
struct SlateQuery {
  int64_t id = 0;
  std::vector<double> relevance;
  Eigen::MatrixXd features;  // documents x feature_dim
};

struct RelevanceData {
  int feature_dim = 0;
  std::vector<SlateQuery> queries;
};

// Relevance = clamp(round(1 + 1.5 * s), 0, 4) with s = f . theta / sqrt(d)
// plus Gaussian noise, for random documents f ~ N(0, I).
struct SyntheticRelevanceSpec {
  size_t num_queries = 400;
  int docs_per_query = 30;
  int feature_dim = 10;
  double noise = 0.5;
  uint64_t seed = 0;
};

RelevanceData MakeSyntheticRelevance(const SyntheticRelevanceSpec& spec);

struct SlateSetupOptions {
  int slate_length = 5;
  int num_items = 20;
  // Share of queries that train the logging and target scorers.
  double scorer_fraction = 0.1;
  double ridge_reg = 1.0;
  std::vector<double> epsilons = DefaultEpsilons();
  uint64_t seed = 0;
};

// One bandit query in rank space: candidates are the top num_items
// documents of the logging scorer in descending score order, so the greedy
// list is [0, ..., l-1].
struct SlateContext {
  int64_t id = 0;
  std::vector<double> relevance;  // per candidate
  Eigen::MatrixXd features;       // candidates x feature_dim
  SlateTuple target;              // top-l candidates of the target scorer
  double epsilon = 0.0;
  double target_ndcg = 0.0;
  SlateContextState state;
};

struct SlateEnvironment {
  SlateBasis basis;
  int feature_dim = 0;
  std::vector<SlateContext> contexts;
  std::unordered_map<int64_t, size_t> index_of;  // context id -> position
};

// Splits queries into scorer-training and bandit parts, trains ridge
// relevance scorers on the second (logging) and first (target) halves of
// the features, and prepares every bandit query with at least num_items
// documents. Throws RankDeficient or SpanViolation from the slate layer.
SlateEnvironment BuildSlateEnvironment(const RelevanceData& data,
                                       const SlateSetupOptions& options);

// Expected reward of the target averaged over the bandit queries: NDCG, or
// 0.25 + 0.5 * NDCG for stochastic rewards.
double SlateTruth(const SlateEnvironment& env, RewardMode mode);

// Queries drawn uniformly with replacement, basis columns from the
// epsilon-greedy logger, rewards NDCG or Bernoulli(0.25 + 0.5 NDCG).
std::vector<LoggedSlateSample> SimulateSlateLogs(const SlateEnvironment& env,
                                                 size_t n, RewardMode mode,
                                                 uint64_t seed);

// Per-position linear reward model: the predicted reward of a slate is
// sum_j (theta_j . f(x, item_j) + b_j) over a chosen feature subset.
class SlatePredictor {
 public:
  SlatePredictor(int slate_length, std::vector<int> features,
                 Eigen::VectorXd weights);

  // eta_hat(x) with eta_hat(x) . lhot(a) the predicted reward of a.
  Eigen::VectorXd Coefficients(const SlateContext& context) const;

  const std::vector<int>& features() const { return features_; }

 private:
  int slate_length_;
  std::vector<int> features_;
  Eigen::VectorXd weights_;  // l blocks of (|features| + 1)
};

// Ridge regression of logged rewards on the slate features with a single
// unpenalized intercept, stored as b_0 (the other b_j are zero).
SlatePredictor FitSlatePredictor(const SlateEnvironment& env,
                                 std::span<const LoggedSlateSample> samples,
                                 std::vector<int> features, double reg);

// The `count` features whose per-slate sums correlate most strongly (in
// absolute value) with the logged rewards; ties go to the lower index.
std::vector<int> TopCorrelatedFeatures(
    const SlateEnvironment& env, std::span<const LoggedSlateSample> samples,
    int count);

struct SlateRunOptions {
  std::vector<RewardMode> reward_modes = {RewardMode::kDeterministic,
                                          RewardMode::kStochastic};
  std::vector<size_t> sample_sizes = {500, 2000};
  int replicates = 20;
  double train_fraction = 0.5;
  double ridge_reg = 1e-3;
  uint64_t seed = 0;
};

struct SlateResultRow {
  RewardMode reward_mode = RewardMode::kDeterministic;
  std::string predictor;  // ridge_all or ridge_5
  size_t n = 0;
  std::string estimator;  // DM, DR-PI, DRs-PI, DRs-PI-oracle
  double mse = 0.0;
};

// Replicate r of (mode, n) uses DeriveSeed(seed, hash of (mode, n, r)), so
// results do not depend on the thread count.
std::vector<SlateResultRow> RunSlateExperiment(const SlateEnvironment& env,
                                               const SlateRunOptions& options,
                                               int threads = 1);

}  // namespace ope

#endif  // OPE_SLATE_EXPERIMENT_H_
