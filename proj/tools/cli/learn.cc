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

#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "commands.h"
#include "ope/error.h"
#include "ope/io.h"
#include "ope/learning.h"
#include "ope/parallel.h"
#include "ope/policy_kit.h"
#include "ope/random.h"
#include "ope/reward_model.h"

namespace ope::cli {
namespace {

constexpr uint64_t kSyntheticStream = 0x1ea0;
constexpr uint64_t kSplitStream = 1;
constexpr uint64_t kSofteningStream = 2;
constexpr uint64_t kLogStream = 3;

const char* const kMethods[] = {"IPS", "DM", "DR", "DRs-direct"};
const char* const kPredictorNames[] = {"zero", "inv_mu", "inv_mu2"};

// One policy to train: predictor index, weight map and gamma. The map is
// canonical (identity for lambda = inf, zero for lambda = 0) so equivalent
// objectives are trained once.
struct Job {
  size_t predictor = 0;
  WeightMap map;
  double gamma = 0.0;

  auto Key() const {
    return std::make_tuple(predictor, static_cast<int>(map.kind), map.lambda,
                           gamma);
  }
};

WeightMap Canonical(ShrinkKind kind, double lambda) {
  if (lambda == kInfinity) return {ShrinkKind::kIdentity, kInfinity};
  if (lambda == 0.0) return {ShrinkKind::kZero, 0.0};
  return {kind, lambda};
}

// Each row of `data` logged exactly once.
std::vector<LoggedSample> LogOnce(const FullInfoDataset& data,
                                  const Policy& logging, RewardMode mode,
                                  uint64_t seed) {
  Rng rng(seed);
  std::vector<LoggedSample> out;
  std::vector<double> probs(data.num_actions);
  for (size_t i = 0; i < data.size(); ++i) {
    logging.Distribution(data.contexts[i], probs);
    LoggedSample s;
    s.context = data.contexts[i];
    s.action = rng.Categorical(probs);
    s.propensity = probs[s.action];
    const double eta = ExpectedReward(data, i, s.action, mode);
    s.reward = mode == RewardMode::kDeterministic
                   ? eta
                   : (rng.Bernoulli(eta) ? 1.0 : 0.0);
    out.push_back(std::move(s));
  }
  return out;
}

struct MethodChoice {
  size_t job = 0;
  double value = 0.0;
};

struct ReplicateOutcome {
  std::vector<Job> jobs;
  std::vector<Eigen::VectorXd> parameters;
  MethodChoice choices[4];
  std::string logging_label;
};

nlohmann::json LambdaJson(double lambda) {
  if (lambda == kInfinity) return "inf";
  return lambda;
}

}  // namespace

int RunLearn(const nlohmann::json& config, const CommonOptions& common,
             std::ostream& out) {
  ConfigObject root(config, "");
  const RunSettings settings = ReadRunSettings(root, common);

  const int replicates = root.Get<int>("replicates", 10);
  if (replicates < 1) throw ConfigError("replicates", "must be >= 1");
  const auto gammas =
      root.Get<std::vector<double>>("gammas", {1e-4, 1e-3, 1e-2, 1e-1});
  if (gammas.empty()) throw ConfigError("gammas", "must not be empty");
  for (double g : gammas) {
    if (!(g > 0.0)) throw ConfigError("gammas", "values must be > 0");
  }
  const auto lambdas =
      root.Get<std::vector<double>>("lambdas", TrainingLambdaGrid());
  if (lambdas.empty()) throw ConfigError("lambdas", "must not be empty");
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw ConfigError("lambdas", "values must be >= 0");
  }
  // JSON has no infinity; "include_dr" keeps lambda = inf in the grid.
  std::vector<double> grid = lambdas;
  if (root.Get<bool>("include_dr", true)) grid.push_back(kInfinity);
  std::vector<ShrinkKind> kinds;
  {
    const auto names = root.Get<std::vector<std::string>>(
        "shrink_kinds", {"optimistic", "pessimistic"});
    if (names.empty()) throw ConfigError("shrink_kinds", "must not be empty");
    for (size_t i = 0; i < names.size(); ++i) {
      const std::string field = "shrink_kinds[" + std::to_string(i) + "]";
      ShrinkKind kind;
      try {
        kind = ParseShrinkKind(names[i]);
      } catch (const OpeError&) {
        throw ConfigError(field, "unknown value '" + names[i] + "'");
      }
      if (kind != ShrinkKind::kOptimistic && kind != ShrinkKind::kPessimistic) {
        throw ConfigError(field, "must be optimistic or pessimistic");
      }
      kinds.push_back(kind);
    }
  }
  RewardMode mode;
  {
    const auto name = root.Get<std::string>("reward_mode", "deterministic");
    try {
      mode = ParseRewardMode(name);
    } catch (const OpeError&) {
      throw ConfigError("reward_mode", "unknown value '" + name + "'");
    }
  }
  const PolicyParams logging_params = ParsePolicyParams(
      root.Get<std::string>("logging", "pi1(0.9,0)"), "logging");
  LogisticOptions logistic;
  logistic.reg = root.Get<double>("logistic_reg", logistic.reg);
  if (!(logistic.reg > 0.0)) throw ConfigError("logistic_reg", "must be > 0");
  const double ridge_reg = root.Get<double>("ridge_reg", 1.0);
  if (!(ridge_reg > 0.0)) throw ConfigError("ridge_reg", "must be > 0");
  TrainOptions train;
  train.step = root.Get<double>("step", train.step);
  if (!(train.step > 0.0)) throw ConfigError("step", "must be > 0");
  train.max_iterations = root.Get<int>("max_iterations", train.max_iterations);
  if (train.max_iterations < 0) {
    throw ConfigError("max_iterations", "must be >= 0");
  }
  DatasetEntry dataset = [&] {
    ConfigObject entry = root.Object("dataset");
    return ReadDatasetEntry(entry, DeriveSeed(settings.seed, kSyntheticStream));
  }();
  root.Finish();

  const FullInfoDataset& data = dataset.data;
  if (data.size() < 16) {
    Fail(ErrorCode::kEmptyDataset, "learning needs at least 16 rows");
  }
  const int k = data.num_actions;
  const int d = data.feature_dim;
  auto featurizer = std::make_shared<const JointFeaturizer>(k, d);

  std::vector<ReplicateOutcome> outcomes(replicates);
  for (int r = 0; r < replicates; ++r) {
    const uint64_t seed = DeriveSeed(settings.seed, static_cast<uint64_t>(r));
    // Four quarters of a seeded permutation.
    std::vector<size_t> order(data.size());
    std::iota(order.begin(), order.end(), size_t{0});
    Rng split_rng(DeriveSeed(seed, kSplitStream));
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[split_rng.UniformInt(i)]);
    }
    std::vector<FullInfoDataset> quarters;
    for (int q = 0; q < 4; ++q) {
      const size_t begin = data.size() * q / 4;
      const size_t end = data.size() * (q + 1) / 4;
      std::vector<size_t> rows(order.begin() + begin, order.begin() + end);
      std::sort(rows.begin(), rows.end());
      quarters.push_back(data.Subset(rows));
    }
    const FullInfoDataset& test = quarters[0];

    PolicyPtr logging;
    if (logging_params.base == PolicyBase::kUniform) {
      logging = std::make_shared<UniformPolicy>(k);
    } else {
      const FeatureMask mask = logging_params.base == PolicyBase::kPi1
                                   ? FeatureMask::kFirstHalf
                                   : FeatureMask::kSecondHalf;
      auto base = std::make_shared<DeterministicPolicy>(
          TrainMultinomialLogistic(test, mask, logistic));
      logging = std::make_shared<SoftenedPolicy>(
          base, SofteningParams{logging_params.alpha, logging_params.beta,
                                DeriveSeed(seed, kSofteningStream)});
    }
    std::vector<std::vector<LoggedSample>> logs;
    for (int q = 1; q < 4; ++q) {
      logs.push_back(LogOnce(quarters[q], *logging, mode,
                             DeriveSeed(seed, kLogStream + q)));
    }
    const std::vector<RewardPredictor> predictors = {
        RewardPredictor::Zero(k, d),
        FitWeightedRidge(logs[0], WeightScheme{SchemeKind::kInvMu}, nullptr, k,
                         d, ridge_reg),
        FitWeightedRidge(logs[0], WeightScheme{SchemeKind::kInvMuSquared},
                         nullptr, k, d, ridge_reg)};
    std::vector<LearningProblem> problems;
    for (const RewardPredictor& p : predictors) {
      problems.emplace_back(logs[1], p, featurizer);
    }

    // Candidate sets per method, as indices into a deduplicated job list.
    ReplicateOutcome& outcome = outcomes[r];
    outcome.logging_label = PolicyLabel(logging_params);
    std::map<decltype(Job{}.Key()), size_t> job_index;
    auto add = [&](size_t predictor, WeightMap map, double gamma) {
      Job job{predictor, map, gamma};
      auto [it, inserted] = job_index.try_emplace(job.Key(), outcome.jobs.size());
      if (inserted) outcome.jobs.push_back(job);
      return it->second;
    };
    std::vector<size_t> candidates[4];
    for (double gamma : gammas) {
      candidates[0].push_back(add(0, Canonical(ShrinkKind::kIdentity, kInfinity), gamma));
      for (size_t p = 0; p < predictors.size(); ++p) {
        candidates[1].push_back(add(p, Canonical(ShrinkKind::kZero, 0.0), gamma));
        candidates[2].push_back(
            add(p, Canonical(ShrinkKind::kIdentity, kInfinity), gamma));
        for (ShrinkKind kind : kinds) {
          for (double lambda : grid) {
            candidates[3].push_back(add(p, Canonical(kind, lambda), gamma));
          }
        }
      }
    }
    std::sort(candidates[3].begin(), candidates[3].end());
    candidates[3].erase(std::unique(candidates[3].begin(), candidates[3].end()),
                        candidates[3].end());

    outcome.parameters.resize(outcome.jobs.size());
    std::vector<double> test_values(outcome.jobs.size());
    std::vector<PolicyPtr> policies(outcome.jobs.size());
    ParallelFor(outcome.jobs.size(), settings.threads, [&](size_t j) {
      const Job& job = outcome.jobs[j];
      const LearningSpec spec{job.map, job.gamma, false};
      outcome.parameters[j] = TrainPolicy(problems[job.predictor], spec, train).u;
      policies[j] = std::make_shared<SoftmaxLinearPolicy>(outcome.parameters[j],
                                                          featurizer);
      test_values[j] = TruePolicyValue(*policies[j], test, mode);
    });

    // Baselines pick gamma and predictor in hindsight on the test quarter.
    for (int m = 0; m < 3; ++m) {
      MethodChoice best{candidates[m].front(), test_values[candidates[m].front()]};
      for (size_t j : candidates[m]) {
        if (test_values[j] > best.value) best = {j, test_values[j]};
      }
      outcome.choices[m] = best;
    }
    std::vector<PolicyPtr> drs_policies;
    for (size_t j : candidates[3]) drs_policies.push_back(policies[j]);
    const size_t chosen =
        SelectLearnedPolicy(drs_policies, logs[2], predictors, logging.get());
    outcome.choices[3] = {candidates[3][chosen],
                          test_values[candidates[3][chosen]]};
  }

  {
    std::ofstream file = OpenOutput(settings.out_dir, "learning_replicates.csv");
    static constexpr std::string_view kHeader[] = {
        "replicate", "method", "predictor", "shrink_kind",
        "lambda",    "gamma",  "value"};
    CsvWriter csv(file, kHeader);
    for (int r = 0; r < replicates; ++r) {
      for (int m = 0; m < 4; ++m) {
        const MethodChoice& c = outcomes[r].choices[m];
        const Job& job = outcomes[r].jobs[c.job];
        csv.Field(static_cast<long long>(r))
            .Field(kMethods[m])
            .Field(kPredictorNames[job.predictor])
            .Field(ShrinkKindName(job.map.kind))
            .Field(job.map.lambda)
            .Field(job.gamma)
            .Field(c.value)
            .EndRow();
      }
    }
  }
  {
    std::ofstream file = OpenOutput(settings.out_dir, "learning_report.csv");
    static constexpr std::string_view kHeader[] = {"method", "value",
                                                   "normalized_value"};
    CsvWriter csv(file, kHeader);
    double means[4] = {0.0, 0.0, 0.0, 0.0};
    for (int m = 0; m < 4; ++m) {
      for (const ReplicateOutcome& o : outcomes) means[m] += o.choices[m].value;
      means[m] /= replicates;
    }
    for (int m = 0; m < 4; ++m) {
      csv.Field(kMethods[m])
          .Field(means[m])
          .Field(means[0] > 0.0 ? means[m] / means[0] : kInfinity)
          .EndRow();
    }
  }
  {
    const ReplicateOutcome& o = outcomes.front();
    const Job& job = o.jobs[o.choices[3].job];
    const LinearScorer scorer =
        ScorerFromParameters(o.parameters[o.choices[3].job], k, d);
    nlohmann::json policy;
    policy["scorer"] = nlohmann::json::parse(scorer.ToJson());
    policy["provenance"] = {
        {"method", "DRs-direct"},
        {"predictor", kPredictorNames[job.predictor]},
        {"shrink_kind", ShrinkKindName(job.map.kind)},
        {"lambda", LambdaJson(job.map.lambda)},
        {"gamma", job.gamma},
        {"logging", o.logging_label},
        {"reward_mode", RewardModeName(mode)},
        {"dataset", dataset.id},
        {"seed", settings.seed},
        {"replicate", 0},
    };
    std::ofstream file = OpenOutput(settings.out_dir, "learned_policy.json");
    file << policy.dump(2) << '\n';
  }
  out << "trained " << outcomes.front().jobs.size() << " policies x "
      << replicates << " replicate(s); outputs in "
      << settings.out_dir.string() << '\n';
  return 0;
}

}  // namespace ope::cli
