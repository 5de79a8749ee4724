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

#include "ope/policy_kit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"
#include "ope/error.h"
#include "ope/random.h"

namespace ope {
namespace {

using Json = nlohmann::json;

std::pair<int, int> ActiveRange(FeatureMask mask, int d) {
  switch (mask) {
    case FeatureMask::kFirstHalf: return {0, d / 2};
    case FeatureMask::kSecondHalf: return {d / 2, d};
    case FeatureMask::kAll: return {0, d};
  }
  return {0, d};
}

// Loss and gradient of the regularized multinomial logistic objective.
// X holds only the active feature columns.
double LogisticLoss(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                    const Eigen::MatrixXd& W, double reg,
                    Eigen::MatrixXd* grad) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd scores = X * W.transpose();  // n x k
  double loss = 0.0;
  if (grad != nullptr) grad->setZero(W.rows(), W.cols());
  Eigen::MatrixXd residual(n, W.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = scores.row(i).maxCoeff();
    double z = 0.0;
    for (Eigen::Index a = 0; a < W.rows(); ++a) {
      residual(i, a) = std::exp(scores(i, a) - top);
      z += residual(i, a);
    }
    loss += top + std::log(z) - scores(i, labels[i]);
    residual.row(i) /= z;
    residual(i, labels[i]) -= 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss = loss * inv_n + reg * W.squaredNorm();
  if (grad != nullptr) {
    *grad = inv_n * residual.transpose() * X + 2.0 * reg * W;
  }
  return loss;
}

}  // namespace

std::string_view FeatureMaskName(FeatureMask mask) {
  switch (mask) {
    case FeatureMask::kFirstHalf: return "first_half";
    case FeatureMask::kSecondHalf: return "second_half";
    case FeatureMask::kAll: return "all";
  }
  return "all";
}

FeatureMask ParseFeatureMask(std::string_view name) {
  if (name == "first_half") return FeatureMask::kFirstHalf;
  if (name == "second_half") return FeatureMask::kSecondHalf;
  if (name == "all") return FeatureMask::kAll;
  Fail(ErrorCode::kParseError, "unknown feature mask '" + std::string(name) +
                                   "'");
}

LinearScorer::LinearScorer(Eigen::MatrixXd weights, FeatureMask mask,
                           Eigen::VectorXd bias)
    : weights_(std::move(weights)), mask_(mask), bias_(std::move(bias)) {
  if (weights_.rows() < 1) {
    Fail(ErrorCode::kInvalidArgument, "scorer needs at least one class");
  }
  if (!weights_.allFinite()) {
    Fail(ErrorCode::kInvalidArgument, "scorer weights must be finite");
  }
  if (bias_.size() != 0 && bias_.size() != weights_.rows()) {
    Fail(ErrorCode::kLengthMismatch, "bias length must equal class count");
  }
}

bool LinearScorer::IsActive(int feature) const {
  const auto [lo, hi] = ActiveRange(mask_, feature_dim());
  return feature >= lo && feature < hi;
}

void LinearScorer::Scores(const Context& x, std::span<double> out) const {
  if (static_cast<int>(x.features.size()) != feature_dim()) {
    Fail(ErrorCode::kLengthMismatch, "context feature length mismatch");
  }
  const auto [lo, hi] = ActiveRange(mask_, feature_dim());
  for (int a = 0; a < num_actions(); ++a) {
    double s = bias_.size() == 0 ? 0.0 : bias_[a];
    for (int j = lo; j < hi; ++j) s += weights_(a, j) * x.features[j];
    out[a] = s;
  }
}

std::vector<double> LinearScorer::Scores(const Context& x) const {
  std::vector<double> out(num_actions());
  Scores(x, out);
  return out;
}

std::string LinearScorer::ToJson() const {
  Json weights = Json::array();
  for (Eigen::Index a = 0; a < weights_.rows(); ++a) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      row.push_back(weights_(a, j));
    }
    weights.push_back(std::move(row));
  }
  Json out = {{"weights", std::move(weights)},
              {"mask", std::string(FeatureMaskName(mask_))}};
  if (bias_.size() != 0) {
    out["bias"] = std::vector<double>(bias_.data(), bias_.data() + bias_.size());
  }
  return out.dump();
}

LinearScorer LinearScorer::FromJson(std::string_view json) {
  Json parsed;
  try {
    parsed = Json::parse(json);
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParseError, std::string("scorer JSON: ") + e.what());
  }
  if (!parsed.is_object() || !parsed.contains("weights") ||
      !parsed.contains("mask")) {
    Fail(ErrorCode::kParseError, "scorer JSON needs 'weights' and 'mask'");
  }
  try {
    const auto rows =
        parsed.at("weights").get<std::vector<std::vector<double>>>();
    if (rows.empty()) Fail(ErrorCode::kParseError, "empty weight matrix");
    Eigen::MatrixXd weights(rows.size(), rows.front().size());
    for (size_t a = 0; a < rows.size(); ++a) {
      if (rows[a].size() != rows.front().size()) {
        Fail(ErrorCode::kParseError, "ragged weight matrix");
      }
      for (size_t j = 0; j < rows[a].size(); ++j) weights(a, j) = rows[a][j];
    }
    Eigen::VectorXd bias;
    if (parsed.contains("bias")) {
      const auto b = parsed.at("bias").get<std::vector<double>>();
      bias = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    }
    return LinearScorer(std::move(weights),
                        ParseFeatureMask(parsed.at("mask").get<std::string>()),
                        std::move(bias));
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParseError, std::string("scorer JSON: ") + e.what());
  }
}

LinearScorer TrainMultinomialLogistic(const FullInfoDataset& data,
                                      FeatureMask mask,
                                      const LogisticOptions& options) {
  if (!(options.reg > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "logistic regularization must be > 0");
  }
  if (data.size() == 0) Fail(ErrorCode::kEmptyDataset, "no training rows");
  const int k = data.num_actions;
  const int d = data.feature_dim;
  const auto [lo, hi] = ActiveRange(mask, d);
  const int active = hi - lo;

  Eigen::MatrixXd X(data.size(), active);
  for (size_t i = 0; i < data.size(); ++i) {
    for (int j = lo; j < hi; ++j) X(i, j - lo) = data.contexts[i].features[j];
  }
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(k, active);

  if (options.max_iterations > 0) {
    Eigen::MatrixXd grad;
    double loss = LogisticLoss(X, data.labels, W, options.reg, &grad);
    double step = 1.0;
    bool converged = grad.norm() <= options.tol;
    for (int it = 0; it < options.max_iterations && !converged; ++it) {
      const double grad_sq = grad.squaredNorm();
      Eigen::MatrixXd candidate;
      double candidate_loss = std::numeric_limits<double>::infinity();
      // Armijo backtracking; the step is allowed to grow again afterwards.
      for (int shrink = 0; shrink < 60; ++shrink) {
        candidate = W - step * grad;
        candidate_loss =
            LogisticLoss(X, data.labels, candidate, options.reg, nullptr);
        if (candidate_loss <= loss - 1e-4 * step * grad_sq) break;
        step *= 0.5;
      }
      W = std::move(candidate);
      loss = LogisticLoss(X, data.labels, W, options.reg, &grad);
      converged = grad.norm() <= options.tol;
      step = std::min(step * 2.0, 1e3);
    }
    if (!converged) {
      Fail(ErrorCode::kNonConvergence,
           "logistic gradient norm " + std::to_string(grad.norm()) +
               " above tolerance after " +
               std::to_string(options.max_iterations) + " iterations");
    }
  }

  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(k, d);
  full.middleCols(lo, active) = W;
  return LinearScorer(std::move(full), mask);
}

int ArgMax(std::span<const double> scores) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(scores.size()); ++a) {
    if (scores[a] > scores[best]) best = a;
  }
  return best;
}

DeterministicPolicy::DeterministicPolicy(LinearScorer scorer)
    : scorer_(std::move(scorer)) {}

int DeterministicPolicy::Choose(const Context& x) const {
  return ArgMax(scorer_.Scores(x));
}

void DeterministicPolicy::Distribution(const Context& x,
                                       std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  out[Choose(x)] = 1.0;
}

double SofteningNoise(uint64_t seed, int64_t context_id) {
  return HashToUnit(DeriveSeed(seed, static_cast<uint64_t>(context_id))) - 0.5;
}

SoftenedPolicy::SoftenedPolicy(PolicyPtr base, SofteningParams params)
    : base_(std::move(base)), params_(params) {
  if (base_ == nullptr) Fail(ErrorCode::kInvalidArgument, "null base policy");
  const double a = params_.alpha;
  const double b = params_.beta;
  // alpha + beta * u must stay in [0, 1] for every u in [-0.5, 0.5].
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0) || a - 0.5 * b < 0.0 ||
      a + 0.5 * b > 1.0) {
    Fail(ErrorCode::kInvalidSoftening,
         "softening (alpha=" + std::to_string(a) + ", beta=" +
             std::to_string(b) + ") can produce negative probabilities");
  }
}

void SoftenedPolicy::Distribution(const Context& x,
                                  std::span<double> out) const {
  const int k = num_actions();
  base_->Distribution(x, out);
  int chosen = -1;
  for (int a = 0; a < k; ++a) {
    if (out[a] == 1.0) {
      chosen = a;
    } else if (out[a] != 0.0) {
      chosen = -2;
      break;
    }
  }
  if (chosen < 0) {
    Fail(ErrorCode::kInvalidArgument,
         "softening needs a deterministic base policy");
  }
  if (k == 1) {
    out[0] = 1.0;
    return;
  }
  const double u = SofteningNoise(params_.seed, x.id);
  const double top = params_.alpha + params_.beta * u;
  const double rest = (1.0 - top) / (k - 1);
  if (top < 0.0 || rest < 0.0) {
    Fail(ErrorCode::kInvalidSoftening, "negative softened probability");
  }
  for (int a = 0; a < k; ++a) out[a] = a == chosen ? top : rest;
}

void Softmax(std::span<double> scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double& s : scores) {
    s = std::exp(s - top);
    z += s;
  }
  for (double& s : scores) s /= z;
}

SoftmaxLinearPolicy::SoftmaxLinearPolicy(
    Eigen::VectorXd parameters,
    std::shared_ptr<const ActionFeaturizer> featurizer)
    : parameters_(std::move(parameters)), featurizer_(std::move(featurizer)) {
  if (featurizer_ == nullptr) {
    Fail(ErrorCode::kInvalidArgument, "null featurizer");
  }
  if (parameters_.size() != featurizer_->dim()) {
    Fail(ErrorCode::kLengthMismatch,
         "parameter length does not match featurizer dimension");
  }
}

void SoftmaxLinearPolicy::Distribution(const Context& x,
                                       std::span<double> out) const {
  std::vector<double> f(featurizer_->dim());
  for (int a = 0; a < num_actions(); ++a) {
    featurizer_->Featurize(x, a, f);
    out[a] = Eigen::Map<const Eigen::VectorXd>(f.data(), f.size())
                 .dot(parameters_);
  }
  Softmax(out);
}

}  // namespace ope
