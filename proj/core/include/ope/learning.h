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

#ifndef OPE_LEARNING_H_
#define OPE_LEARNING_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ope/data.h"
#include "ope/estimators.h"
#include "ope/features.h"
#include "ope/policy.h"
#include "ope/policy_kit.h"
#include "ope/reward_model.h"

namespace ope {

// Shrinkage coefficients tried while training policies.
std::vector<double> TrainingLambdaGrid();

// d w_hat / d w. Optimistic: lambda (lambda - w^2) / (w^2 + lambda)^2 (1 at
// lambda = inf, 0 at lambda = 0). Pessimistic: 1 below the clip point and 0
// from it on.
double ShrinkDerivative(const WeightMap& map, double w);

struct LearningSpec {
  WeightMap map;
  double gamma = 1e-3;
  bool self_normalized = false;
};

// -V_DRs(pi_u; eta_hat, w_hat) + gamma ||u||^2 over logged samples, where
// pi_u is the softmax-linear policy and w = pi_u(a|x) / mu(a|x).
class LearningProblem {
 public:
  LearningProblem(std::vector<LoggedSample> samples, RewardPredictor predictor,
                  std::shared_ptr<const ActionFeaturizer> featurizer);

  int dim() const { return featurizer_->dim(); }
  size_t size() const { return samples_.size(); }

  double Objective(const Eigen::VectorXd& u, const LearningSpec& spec) const;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& u,
                           const LearningSpec& spec) const;
  // Both at once; `gradient` may be null.
  double Evaluate(const Eigen::VectorXd& u, const LearningSpec& spec,
                  Eigen::VectorXd* gradient) const;

 private:
  std::vector<LoggedSample> samples_;
  std::vector<double> eta_;  // n x k predictions
  RewardPredictor predictor_;
  std::shared_ptr<const ActionFeaturizer> featurizer_;
};

// Central differences with step h, for checking Gradient.
Eigen::VectorXd FiniteDifferenceGradient(const LearningProblem& problem,
                                         const Eigen::VectorXd& u,
                                         const LearningSpec& spec,
                                         double h = 1e-5);

// max_j |g_j - g_fd_j| / max(||g||_inf, 1e-8).
double GradientRelativeError(const Eigen::VectorXd& analytic,
                             const Eigen::VectorXd& numeric);

struct TrainOptions {
  double step = 0.1;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-6;
};

struct TrainResult {
  Eigen::VectorXd u;
  std::vector<double> trace;  // objective after each accepted step
  int iterations = 0;
  bool converged = false;
};

// Gradient descent from u = 0 with Armijo backtracking from `step`, so the
// trace never increases. Throws NonFiniteObjective on overflow.
TrainResult TrainPolicy(const LearningProblem& problem,
                        const LearningSpec& spec,
                        const TrainOptions& options = {});

// A joint-feature softmax policy as a LinearScorer with per-action bias
// (softmax of the scorer's scores gives the policy), and back.
LinearScorer ScorerFromParameters(const Eigen::VectorXd& u, int num_actions,
                                  int feature_dim);
Eigen::VectorXd ParametersFromScorer(const LinearScorer& scorer);

// Scores each candidate policy by its DRs-direct selected value estimate on
// the validation samples and returns the best index (ties to the first).
// `predictors` form the candidate reward models; `logging` enables the
// analytic bias bounds.
size_t SelectLearnedPolicy(std::span<const PolicyPtr> candidates,
                           std::span<const LoggedSample> validation,
                           std::span<const RewardPredictor> predictors,
                           const Policy* logging,
                           std::vector<double>* values = nullptr);

}  // namespace ope

#endif  // OPE_LEARNING_H_
