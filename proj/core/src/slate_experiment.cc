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

#include "ope/slate_experiment.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ope/error.h"
#include "ope/model_selection.h"
#include "ope/parallel.h"
#include "ope/random.h"
#include "ope/stats.h"

namespace ope {
namespace {

constexpr uint64_t kScorerSplitStream = 0x51;
constexpr uint64_t kEpsilonStream = 0x52;
constexpr int kCorrelatedFeatures = 5;

// Ridge fit of relevance on the features in [begin, end) plus an intercept.
Eigen::VectorXd FitRelevanceScorer(std::span<const SlateQuery* const> queries,
                                   int begin, int end, double reg) {
  const int p = end - begin + 1;
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd phi(p);
  double count = 0.0;
  for (const SlateQuery* q : queries) {
    for (Eigen::Index doc = 0; doc < q->features.rows(); ++doc) {
      phi.head(p - 1) = q->features.row(doc).segment(begin, p - 1).transpose();
      phi[p - 1] = 1.0;
      normal.selfadjointView<Eigen::Lower>().rankUpdate(phi);
      rhs += q->relevance[doc] * phi;
      count += 1.0;
    }
  }
  if (count == 0.0) Fail(ErrorCode::kEmptyDataset, "no scorer training data");
  Eigen::MatrixXd a = normal.selfadjointView<Eigen::Lower>();
  a /= count;
  a.diagonal().array() += reg;
  return a.ldlt().solve(rhs / count);
}

double ScoreDocument(const Eigen::VectorXd& theta, const Eigen::MatrixXd& f,
                     Eigen::Index doc, int begin) {
  const int p = static_cast<int>(theta.size()) - 1;
  return f.row(doc).segment(begin, p).dot(theta.head(p)) + theta[p];
}

// Indices sorted by descending score; ties keep the lower index first.
std::vector<int> RankByScore(const std::vector<double>& scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

RelevanceData MakeSyntheticRelevance(const SyntheticRelevanceSpec& spec) {
  if (spec.num_queries == 0 || spec.docs_per_query < 1 ||
      spec.feature_dim < 1) {
    Fail(ErrorCode::kInvalidArgument, "bad synthetic relevance shape");
  }
  Rng rng(spec.seed);
  Eigen::VectorXd theta(spec.feature_dim);
  for (Eigen::Index j = 0; j < theta.size(); ++j) theta[j] = rng.Normal();
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.feature_dim));
  RelevanceData data;
  data.feature_dim = spec.feature_dim;
  data.queries.reserve(spec.num_queries);
  for (size_t q = 0; q < spec.num_queries; ++q) {
    SlateQuery query;
    query.id = static_cast<int64_t>(q);
    query.features.resize(spec.docs_per_query, spec.feature_dim);
    query.relevance.resize(spec.docs_per_query);
    for (int doc = 0; doc < spec.docs_per_query; ++doc) {
      for (int j = 0; j < spec.feature_dim; ++j) {
        query.features(doc, j) = rng.Normal();
      }
      const double s = scale * query.features.row(doc).dot(theta) +
                       spec.noise * rng.Normal();
      query.relevance[doc] = std::clamp(std::round(1.0 + 1.5 * s), 0.0, 4.0);
    }
    data.queries.push_back(std::move(query));
  }
  return data;
}

SlateEnvironment BuildSlateEnvironment(const RelevanceData& data,
                                       const SlateSetupOptions& options) {
  const int l = options.slate_length;
  const int m = options.num_items;
  const int d = data.feature_dim;
  if (d < 2) {
    Fail(ErrorCode::kInvalidArgument,
         "slate scorers need at least two features");
  }
  if (!(options.scorer_fraction > 0.0 && options.scorer_fraction < 1.0)) {
    Fail(ErrorCode::kBadFractions, "scorer_fraction must lie in (0, 1)");
  }
  SlateEnvironment env{SlateBasis::Build(l, m), d, {}, {}};

  // Seeded query split into scorer training and bandit pool.
  std::vector<size_t> order(data.queries.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(DeriveSeed(options.seed, kScorerSplitStream));
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformInt(i)]);
  }
  const auto cut = static_cast<size_t>(std::floor(
      options.scorer_fraction * static_cast<double>(order.size()) + 1e-9));
  std::vector<const SlateQuery*> scorer_queries;
  for (size_t i = 0; i < cut; ++i) scorer_queries.push_back(&data.queries[order[i]]);
  const int half = d / 2;
  const Eigen::VectorXd target_theta =
      FitRelevanceScorer(scorer_queries, 0, half, options.ridge_reg);
  const Eigen::VectorXd logging_theta =
      FitRelevanceScorer(scorer_queries, half, d, options.ridge_reg);

  std::vector<size_t> pool(order.begin() + cut, order.end());
  std::sort(pool.begin(), pool.end());
  for (size_t qi : pool) {
    const SlateQuery& query = data.queries[qi];
    const Eigen::Index docs = query.features.rows();
    if (docs < m) continue;
    if (query.features.cols() != d ||
        static_cast<Eigen::Index>(query.relevance.size()) != docs) {
      Fail(ErrorCode::kLengthMismatch,
           "query " + std::to_string(query.id) + " has malformed features");
    }
    std::vector<double> logging_scores(docs);
    for (Eigen::Index doc = 0; doc < docs; ++doc) {
      logging_scores[doc] = ScoreDocument(logging_theta, query.features, doc, half);
    }
    const std::vector<int> ranked = RankByScore(logging_scores);

    SlateContext ctx;
    ctx.id = query.id;
    ctx.relevance.resize(m);
    ctx.features.resize(m, d);
    std::vector<double> target_scores(m);
    for (int r = 0; r < m; ++r) {
      ctx.relevance[r] = query.relevance[ranked[r]];
      ctx.features.row(r) = query.features.row(ranked[r]);
      target_scores[r] = ScoreDocument(target_theta, ctx.features, r, 0);
    }
    const std::vector<int> target_rank = RankByScore(target_scores);
    ctx.target.assign(target_rank.begin(), target_rank.begin() + l);
    ctx.epsilon = DrawEpsilon(options.epsilons,
                              DeriveSeed(options.seed, kEpsilonStream), ctx.id);
    ctx.target_ndcg = Ndcg(ctx.relevance, ctx.target);
    ctx.state = PrepareContext(env.basis, LhotEncode(ctx.target, m),
                               EpsilonGreedyDistribution(env.basis.size(),
                                                         ctx.epsilon));
    env.index_of[ctx.id] = env.contexts.size();
    env.contexts.push_back(std::move(ctx));
  }
  if (env.contexts.empty()) {
    Fail(ErrorCode::kEmptyDataset,
         "no bandit query has at least " + std::to_string(m) + " documents");
  }
  return env;
}

double SlateTruth(const SlateEnvironment& env, RewardMode mode) {
  double total = 0.0;
  for (const SlateContext& ctx : env.contexts) {
    total += mode == RewardMode::kDeterministic ? ctx.target_ndcg
                                                : 0.25 + 0.5 * ctx.target_ndcg;
  }
  return total / static_cast<double>(env.contexts.size());
}

std::vector<LoggedSlateSample> SimulateSlateLogs(const SlateEnvironment& env,
                                                 size_t n, RewardMode mode,
                                                 uint64_t seed) {
  Rng rng(seed);
  std::vector<LoggedSlateSample> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const SlateContext& ctx = env.contexts[rng.UniformInt(env.contexts.size())];
    const int b = rng.Categorical(ctx.state.mu);
    const double ndcg = Ndcg(ctx.relevance, env.basis.tuples()[b]);
    double reward = ndcg;
    if (mode == RewardMode::kStochastic) {
      reward = rng.Bernoulli(0.25 + 0.5 * ndcg) ? 1.0 : 0.0;
    }
    out.push_back({ctx.id, ctx.epsilon, b, reward, ctx.state.mu[b]});
  }
  return out;
}

SlatePredictor::SlatePredictor(int slate_length, std::vector<int> features,
                               Eigen::VectorXd weights)
    : slate_length_(slate_length),
      features_(std::move(features)),
      weights_(std::move(weights)) {
  const Eigen::Index block = static_cast<Eigen::Index>(features_.size()) + 1;
  if (weights_.size() != slate_length_ * block) {
    Fail(ErrorCode::kLengthMismatch, "slate predictor weight length");
  }
}

Eigen::VectorXd SlatePredictor::Coefficients(const SlateContext& ctx) const {
  const int m = static_cast<int>(ctx.features.rows());
  const int p = static_cast<int>(features_.size());
  Eigen::VectorXd eta(slate_length_ * m);
  for (int j = 0; j < slate_length_; ++j) {
    const double* w = weights_.data() + j * (p + 1);
    for (int r = 0; r < m; ++r) {
      double value = w[p];
      for (int k = 0; k < p; ++k) value += w[k] * ctx.features(r, features_[k]);
      eta[j * m + r] = value;
    }
  }
  return eta;
}

SlatePredictor FitSlatePredictor(const SlateEnvironment& env,
                                 std::span<const LoggedSlateSample> samples,
                                 std::vector<int> features, double reg) {
  if (samples.empty()) Fail(ErrorCode::kEmptyDataset, "no slate samples");
  const int l = env.basis.slate_length();
  const int p = static_cast<int>(features.size());
  const int dim = l * p + 1;
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd phi(dim);
  for (const LoggedSlateSample& s : samples) {
    const SlateContext& ctx = env.contexts[env.index_of.at(s.context_id)];
    const SlateTuple& tuple = env.basis.tuples()[s.basis_index];
    for (int j = 0; j < l; ++j) {
      for (int k = 0; k < p; ++k) {
        phi[j * p + k] = ctx.features(tuple[j], features[k]);
      }
    }
    phi[dim - 1] = 1.0;
    normal.selfadjointView<Eigen::Lower>().rankUpdate(phi);
    rhs += s.reward * phi;
  }
  const double count = static_cast<double>(samples.size());
  Eigen::MatrixXd a = normal.selfadjointView<Eigen::Lower>();
  a /= count;
  a.diagonal().head(dim - 1).array() += reg;
  const Eigen::VectorXd theta = a.ldlt().solve(rhs / count);
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(l * (p + 1));
  for (int j = 0; j < l; ++j) {
    weights.segment(j * (p + 1), p) = theta.segment(j * p, p);
  }
  weights[p] = theta[dim - 1];
  return SlatePredictor(l, std::move(features), std::move(weights));
}

std::vector<int> TopCorrelatedFeatures(
    const SlateEnvironment& env, std::span<const LoggedSlateSample> samples,
    int count) {
  const int d = env.feature_dim;
  const int l = env.basis.slate_length();
  const double n = static_cast<double>(samples.size());
  std::vector<double> strength(d, 0.0);
  double r_mean = 0.0;
  for (const LoggedSlateSample& s : samples) r_mean += s.reward;
  r_mean /= n;
  for (int k = 0; k < d; ++k) {
    std::vector<double> x(samples.size());
    double x_mean = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
      const SlateContext& ctx =
          env.contexts[env.index_of.at(samples[i].context_id)];
      const SlateTuple& tuple = env.basis.tuples()[samples[i].basis_index];
      double sum = 0.0;
      for (int j = 0; j < l; ++j) sum += ctx.features(tuple[j], k);
      x[i] = sum;
      x_mean += sum;
    }
    x_mean /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
      const double dx = x[i] - x_mean;
      const double dy = samples[i].reward - r_mean;
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
    strength[k] = (sxx > 0.0 && syy > 0.0) ? std::abs(sxy) / std::sqrt(sxx * syy)
                                           : 0.0;
  }
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return strength[a] > strength[b]; });
  order.resize(std::min(count, d));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<SlateResultRow> RunSlateExperiment(const SlateEnvironment& env,
                                               const SlateRunOptions& options,
                                               int threads) {
  if (options.replicates < 1) {
    Fail(ErrorCode::kInvalidArgument, "replicates must be >= 1");
  }
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    Fail(ErrorCode::kBadFractions, "train_fraction must lie in (0, 1)");
  }
  static const char* const kPredictors[] = {"ridge_all", "ridge_5"};
  static const char* const kEstimators[] = {"DM", "DR-PI", "DRs-PI",
                                            "DRs-PI-oracle"};
  constexpr size_t kNumPredictors = 2;
  constexpr size_t kNumEstimators = 4;

  struct Task {
    size_t mode;
    size_t size;
    int replicate;
  };
  std::vector<Task> tasks;
  for (size_t mi = 0; mi < options.reward_modes.size(); ++mi) {
    for (size_t si = 0; si < options.sample_sizes.size(); ++si) {
      if (options.sample_sizes[si] < 4) {
        Fail(ErrorCode::kInvalidArgument, "slate sample sizes must be >= 4");
      }
      for (int r = 0; r < options.replicates; ++r) tasks.push_back({mi, si, r});
    }
  }
  std::vector<double> truths;
  for (RewardMode mode : options.reward_modes) {
    truths.push_back(SlateTruth(env, mode));
  }
  // estimates[task][predictor * kNumEstimators + estimator]
  std::vector<std::vector<double>> estimates(tasks.size());

  ParallelFor(tasks.size(), threads, [&](size_t t) {
    const Task& task = tasks[t];
    const RewardMode mode = options.reward_modes[task.mode];
    const size_t n = options.sample_sizes[task.size];
    const uint64_t seed = DeriveSeed(
        DeriveSeed(DeriveSeed(options.seed, static_cast<uint64_t>(mode)), n),
        static_cast<uint64_t>(task.replicate));
    const std::vector<LoggedSlateSample> samples =
        SimulateSlateLogs(env, n, mode, seed);
    const auto cut = static_cast<size_t>(
        std::floor(options.train_fraction * static_cast<double>(n) + 1e-9));
    const std::span<const LoggedSlateSample> all(samples);
    const auto train = all.first(cut);
    const auto eval = all.subspan(cut);

    std::vector<int> every(env.feature_dim);
    std::iota(every.begin(), every.end(), 0);
    const SlatePredictor predictors[kNumPredictors] = {
        FitSlatePredictor(env, train, every, options.ridge_reg),
        FitSlatePredictor(
            env, train,
            TopCorrelatedFeatures(env, train, kCorrelatedFeatures),
            options.ridge_reg)};

    std::vector<const SlateContextState*> states;
    std::vector<const SlateContext*> contexts;
    for (const LoggedSlateSample& s : eval) {
      const SlateContext& ctx = env.contexts[env.index_of.at(s.context_id)];
      contexts.push_back(&ctx);
      states.push_back(&ctx.state);
    }
    std::vector<double>& out = estimates[t];
    for (const SlatePredictor& predictor : predictors) {
      std::vector<Eigen::VectorXd> eta;
      eta.reserve(eval.size());
      for (const SlateContext* ctx : contexts) {
        eta.push_back(predictor.Coefficients(*ctx));
      }
      const EvalTable tables[] = {
          BuildSlateEvalTable(eval, states, eta, env.basis)};
      std::vector<EstimatorSpec> specs;
      for (double lambda : SlateLambdaGrid(tables[0].weight)) {
        specs.push_back({0, WeightMap{ShrinkKind::kOptimistic, lambda}});
      }
      const SelectionResult selected =
          Select(specs, tables, SelectionRule::kDirect);
      std::vector<double> values;
      for (const SelectionScore& score : selected.scores) {
        values.push_back(score.estimate);
      }
      out.push_back(DrsPiEstimate(tables[0], 0.0).value);
      out.push_back(DrsPiEstimate(tables[0], kInfinity).value);
      out.push_back(values[selected.chosen]);
      out.push_back(values[OracleSelect(values, truths[task.mode])]);
    }
  });

  std::vector<SlateResultRow> rows;
  for (size_t mi = 0; mi < options.reward_modes.size(); ++mi) {
    for (size_t p = 0; p < kNumPredictors; ++p) {
      for (size_t si = 0; si < options.sample_sizes.size(); ++si) {
        for (size_t e = 0; e < kNumEstimators; ++e) {
          std::vector<double> values;
          for (size_t t = 0; t < tasks.size(); ++t) {
            if (tasks[t].mode == mi && tasks[t].size == si) {
              values.push_back(estimates[t][p * kNumEstimators + e]);
            }
          }
          rows.push_back({options.reward_modes[mi], kPredictors[p],
                          options.sample_sizes[si], kEstimators[e],
                          Mse(values, truths[mi])});
        }
      }
    }
  }
  return rows;
}

}  // namespace ope
