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

#include "ope/learning.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ope/error.h"
#include "ope/model_selection.h"

namespace ope {

std::vector<double> TrainingLambdaGrid() {
  return {0.0, 0.1, 1.0, 10.0, 100.0, 1000.0, kInfinity};
}

double ShrinkDerivative(const WeightMap& map, double w) {
  switch (map.kind) {
    case ShrinkKind::kIdentity:
      return 1.0;
    case ShrinkKind::kZero:
      return 0.0;
    case ShrinkKind::kPessimistic:
      return w < map.lambda ? 1.0 : 0.0;
    case ShrinkKind::kOptimistic: {
      if (map.lambda == kInfinity) return 1.0;
      if (map.lambda == 0.0) return 0.0;
      const double denom = w * w + map.lambda;
      return map.lambda * (map.lambda - w * w) / (denom * denom);
    }
    case ShrinkKind::kSwitch:
      return w <= map.lambda ? 1.0 : 0.0;
  }
  return 1.0;
}

LearningProblem::LearningProblem(
    std::vector<LoggedSample> samples, RewardPredictor predictor,
    std::shared_ptr<const ActionFeaturizer> featurizer)
    : samples_(std::move(samples)),
      predictor_(std::move(predictor)),
      featurizer_(std::move(featurizer)) {
  if (samples_.empty()) Fail(ErrorCode::kEmptyDataset, "no training samples");
  if (featurizer_ == nullptr) Fail(ErrorCode::kInvalidArgument, "no featurizer");
  const int k = featurizer_->num_actions();
  if (predictor_.num_actions() != k) {
    Fail(ErrorCode::kInvalidArgument, "predictor and featurizer disagree on k");
  }
  eta_.resize(samples_.size() * k);
  for (size_t i = 0; i < samples_.size(); ++i) {
    const LoggedSample& s = samples_[i];
    if (s.action < 0 || s.action >= k) {
      Fail(ErrorCode::kIndexOutOfRange, "logged action out of range");
    }
    if (!(s.propensity > 0.0)) {
      Fail(ErrorCode::kZeroPropensity, "learning needs propensities > 0");
    }
    predictor_.PredictAll(s.context, std::span<double>(eta_).subspan(i * k, k));
  }
}

double LearningProblem::Evaluate(const Eigen::VectorXd& u,
                                 const LearningSpec& spec,
                                 Eigen::VectorXd* gradient) const {
  const int k = featurizer_->num_actions();
  const int dim = featurizer_->dim();
  if (u.size() != dim) Fail(ErrorCode::kLengthMismatch, "parameter length");
  const bool want_grad = gradient != nullptr;
  const double n = static_cast<double>(samples_.size());

  Eigen::MatrixXd features(k, dim);
  std::vector<double> row(dim);
  Eigen::VectorXd probs(k);
  Eigen::VectorXd fbar(dim);

  double dm_sum = 0.0;
  double correction_sum = 0.0;  // sum w_hat * res
  double weight_sum = 0.0;      // sum w_hat
  Eigen::VectorXd dm_grad = Eigen::VectorXd::Zero(want_grad ? dim : 0);
  Eigen::VectorXd correction_grad = dm_grad;
  Eigen::VectorXd weight_grad = dm_grad;

  for (size_t i = 0; i < samples_.size(); ++i) {
    const LoggedSample& s = samples_[i];
    for (int a = 0; a < k; ++a) {
      featurizer_->Featurize(s.context, a, row);
      features.row(a) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), dim);
    }
    probs = features * u;
    Softmax(std::span<double>(probs.data(), k));
    const double* eta = &eta_[i * k];
    double dm = 0.0;
    for (int a = 0; a < k; ++a) dm += probs[a] * eta[a];
    const double w = probs[s.action] / s.propensity;
    const double w_hat = spec.map.Apply(w);
    const double residual = s.reward - eta[s.action];
    dm_sum += dm;
    correction_sum += w_hat * residual;
    weight_sum += w_hat;
    if (want_grad) {
      fbar.noalias() = features.transpose() * probs;
      Eigen::VectorXd weighted(k);
      for (int a = 0; a < k; ++a) weighted[a] = probs[a] * eta[a];
      dm_grad.noalias() += features.transpose() * weighted;
      dm_grad -= dm * fbar;
      const double slope = ShrinkDerivative(spec.map, w) * w;
      if (slope != 0.0) {
        const Eigen::VectorXd dw_hat =
            slope * (features.row(s.action).transpose() - fbar);
        correction_grad += residual * dw_hat;
        weight_grad += dw_hat;
      }
    }
  }

  double value = dm_sum / n;
  Eigen::VectorXd value_grad;
  if (want_grad) value_grad = dm_grad / n;
  if (spec.self_normalized) {
    if (weight_sum > 0.0) {
      value += correction_sum / weight_sum;
      if (want_grad) {
        value_grad += (correction_grad * weight_sum -
                       correction_sum * weight_grad) /
                      (weight_sum * weight_sum);
      }
    }
  } else {
    value += correction_sum / n;
    if (want_grad) value_grad += correction_grad / n;
  }
  const double objective = -value + spec.gamma * u.squaredNorm();
  if (want_grad) *gradient = -value_grad + 2.0 * spec.gamma * u;
  return objective;
}

double LearningProblem::Objective(const Eigen::VectorXd& u,
                                  const LearningSpec& spec) const {
  return Evaluate(u, spec, nullptr);
}

Eigen::VectorXd LearningProblem::Gradient(const Eigen::VectorXd& u,
                                          const LearningSpec& spec) const {
  Eigen::VectorXd gradient;
  Evaluate(u, spec, &gradient);
  return gradient;
}

Eigen::VectorXd FiniteDifferenceGradient(const LearningProblem& problem,
                                         const Eigen::VectorXd& u,
                                         const LearningSpec& spec, double h) {
  Eigen::VectorXd out(u.size());
  Eigen::VectorXd probe = u;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    probe[j] = u[j] + h;
    const double up = problem.Objective(probe, spec);
    probe[j] = u[j] - h;
    const double down = problem.Objective(probe, spec);
    probe[j] = u[j];
    out[j] = (up - down) / (2.0 * h);
  }
  return out;
}

double GradientRelativeError(const Eigen::VectorXd& analytic,
                             const Eigen::VectorXd& numeric) {
  if (analytic.size() != numeric.size()) {
    Fail(ErrorCode::kLengthMismatch, "gradient lengths differ");
  }
  if (analytic.size() == 0) return 0.0;
  const double scale = std::max(analytic.cwiseAbs().maxCoeff(), 1e-8);
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

TrainResult TrainPolicy(const LearningProblem& problem,
                        const LearningSpec& spec,
                        const TrainOptions& options) {
  if (!(options.step > 0.0) || options.max_iterations < 0) {
    Fail(ErrorCode::kInvalidArgument, "bad training options");
  }
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 60;
  TrainResult result;
  result.u = Eigen::VectorXd::Zero(problem.dim());
  Eigen::VectorXd gradient;
  double objective = problem.Evaluate(result.u, spec, &gradient);
  if (!std::isfinite(objective)) {
    Fail(ErrorCode::kNonFiniteObjective, "objective is not finite at u = 0");
  }
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (!gradient.allFinite()) {
      Fail(ErrorCode::kNonFiniteObjective, "gradient is not finite");
    }
    const double grad_sq = gradient.squaredNorm();
    if (std::sqrt(grad_sq) <= options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    double step = options.step;
    bool accepted = false;
    Eigen::VectorXd candidate;
    double candidate_objective = 0.0;
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      candidate = result.u - step * gradient;
      candidate_objective = problem.Objective(candidate, spec);
      if (std::isfinite(candidate_objective) &&
          candidate_objective <= objective - kArmijo * step * grad_sq) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No descent along the gradient at machine precision.
      result.converged = true;
      break;
    }
    result.u = std::move(candidate);
    objective = problem.Evaluate(result.u, spec, &gradient);
    if (!std::isfinite(objective)) {
      Fail(ErrorCode::kNonFiniteObjective, "objective overflowed");
    }
    result.trace.push_back(objective);
    result.iterations = iter + 1;
  }
  if (!result.converged && gradient.norm() <= options.gradient_tolerance) {
    result.converged = true;
  }
  return result;
}

LinearScorer ScorerFromParameters(const Eigen::VectorXd& u, int num_actions,
                                  int feature_dim) {
  const int block = feature_dim + 1;
  if (u.size() != static_cast<Eigen::Index>(num_actions) * block) {
    Fail(ErrorCode::kLengthMismatch, "parameter length mismatch");
  }
  Eigen::MatrixXd weights(num_actions, feature_dim);
  Eigen::VectorXd bias(num_actions);
  for (int a = 0; a < num_actions; ++a) {
    for (int j = 0; j < feature_dim; ++j) weights(a, j) = u[a * block + j];
    bias[a] = u[a * block + feature_dim];
  }
  return LinearScorer(std::move(weights), FeatureMask::kAll, std::move(bias));
}

Eigen::VectorXd ParametersFromScorer(const LinearScorer& scorer) {
  if (scorer.mask() != FeatureMask::kAll) {
    Fail(ErrorCode::kInvalidArgument,
         "only full-feature scorers map to joint-feature parameters");
  }
  const int k = scorer.num_actions();
  const int d = scorer.feature_dim();
  const int block = d + 1;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k) * block);
  for (int a = 0; a < k; ++a) {
    for (int j = 0; j < d; ++j) u[a * block + j] = scorer.weights()(a, j);
    if (scorer.bias().size() == k) u[a * block + d] = scorer.bias()[a];
  }
  return u;
}

size_t SelectLearnedPolicy(std::span<const PolicyPtr> candidates,
                           std::span<const LoggedSample> validation,
                           std::span<const RewardPredictor> predictors,
                           const Policy* logging, std::vector<double>* values) {
  if (candidates.empty()) Fail(ErrorCode::kInvalidArgument, "no candidates");
  if (predictors.empty()) {
    Fail(ErrorCode::kInvalidArgument, "no reward predictors for validation");
  }
  if (values != nullptr) values->clear();
  size_t best = 0;
  double best_value = -kInfinity;
  for (size_t c = 0; c < candidates.size(); ++c) {
    std::vector<EvalTable> tables;
    for (const RewardPredictor& predictor : predictors) {
      tables.push_back(
          BuildEvalTable(validation, *candidates[c], predictor, logging));
    }
    std::vector<EstimatorSpec> specs;
    for (ShrinkKind kind : {ShrinkKind::kOptimistic, ShrinkKind::kPessimistic}) {
      for (double lambda : LambdaGrid(tables.front().weight, kind)) {
        for (size_t p = 0; p < tables.size(); ++p) {
          specs.push_back({p, WeightMap{kind, lambda}});
        }
      }
    }
    const SelectionResult result =
        Select(specs, tables, SelectionRule::kDrsDirect);
    const double value = result.scores[result.chosen].estimate;
    if (values != nullptr) values->push_back(value);
    if (value > best_value) {
      best_value = value;
      best = c;
    }
  }
  return best;
}

}  // namespace ope
