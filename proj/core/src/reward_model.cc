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

#include "ope/reward_model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "json.hpp"
#include "ope/error.h"
#include "ope/random.h"

namespace ope {

JointFeaturizer::JointFeaturizer(int num_actions, int feature_dim)
    : num_actions_(num_actions), feature_dim_(feature_dim) {
  if (num_actions_ < 1 || feature_dim_ < 0) {
    Fail(ErrorCode::kInvalidArgument, "bad joint featurizer shape");
  }
}

void JointFeaturizer::Featurize(const Context& x, int action,
                                std::span<double> out) const {
  if (static_cast<int>(x.features.size()) != feature_dim_) {
    Fail(ErrorCode::kLengthMismatch, "context feature length mismatch");
  }
  if (action < 0 || action >= num_actions_) {
    Fail(ErrorCode::kIndexOutOfRange, "action outside featurizer range");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const int offset = action * (feature_dim_ + 1);
  std::copy(x.features.begin(), x.features.end(), out.begin() + offset);
  out[offset + feature_dim_] = 1.0;
}

std::vector<double> JointFeaturize(const Context& x, int action,
                                   int num_actions) {
  const JointFeaturizer featurizer(num_actions,
                                   static_cast<int>(x.features.size()));
  std::vector<double> out(featurizer.dim());
  featurizer.Featurize(x, action, out);
  return out;
}

std::string_view SchemeName(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kConst1: return "z1";
    case SchemeKind::kW: return "w";
    case SchemeKind::kWSquared: return "w2";
    case SchemeKind::kMrdr: return "mrdr";
    case SchemeKind::kInvMu: return "inv_mu";
    case SchemeKind::kInvMuSquared: return "inv_mu2";
    case SchemeKind::kZeroPredictor: return "zero";
  }
  return "z1";
}

SchemeKind ParseScheme(std::string_view name) {
  for (SchemeKind kind :
       {SchemeKind::kConst1, SchemeKind::kW, SchemeKind::kWSquared,
        SchemeKind::kMrdr, SchemeKind::kInvMu, SchemeKind::kInvMuSquared,
        SchemeKind::kZeroPredictor}) {
    if (SchemeName(kind) == name) return kind;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown reward predictor scheme '" + std::string(name) + "'");
}

double SchemeWeight(SchemeKind kind, double pi, double mu) {
  if (!(mu > 0.0)) {
    Fail(ErrorCode::kZeroPropensity, "scheme weight needs mu > 0");
  }
  switch (kind) {
    case SchemeKind::kConst1:
    case SchemeKind::kZeroPredictor:
      return 1.0;
    case SchemeKind::kW: return pi / mu;
    case SchemeKind::kWSquared: {
      const double w = pi / mu;
      return w * w;
    }
    case SchemeKind::kInvMu: return 1.0 / mu;
    case SchemeKind::kInvMuSquared: return 1.0 / (mu * mu);
    case SchemeKind::kMrdr:
      break;
  }
  Fail(ErrorCode::kInvalidArgument,
       "MRDR weights depend on the per-sample reference action");
}

int MrdrReferenceAction(std::span<const double> pi, uint64_t seed,
                        uint64_t index) {
  for (size_t a = 0; a < pi.size(); ++a) {
    if (pi[a] == 1.0) return static_cast<int>(a);
  }
  Rng rng(DeriveSeed(seed, index));
  return rng.Categorical(pi);
}

std::vector<double> MrdrWeights(std::span<const LoggedSample> samples,
                                const Policy& target, uint64_t seed) {
  std::vector<double> z(samples.size());
  std::vector<double> pi(target.num_actions());
  for (size_t i = 0; i < samples.size(); ++i) {
    const LoggedSample& s = samples[i];
    if (!(s.propensity > 0.0)) {
      Fail(ErrorCode::kZeroPropensity, "MRDR weights need propensities > 0");
    }
    target.Distribution(s.context, pi);
    const int reference = MrdrReferenceAction(pi, seed, i);
    z[i] = reference == s.action
               ? (1.0 - s.propensity) / (s.propensity * s.propensity)
               : 0.0;
  }
  return z;
}

std::vector<double> SchemeWeights(std::span<const LoggedSample> samples,
                                  const WeightScheme& scheme,
                                  const Policy* target) {
  const bool needs_target = scheme.kind == SchemeKind::kW ||
                            scheme.kind == SchemeKind::kWSquared ||
                            scheme.kind == SchemeKind::kMrdr;
  if (needs_target && target == nullptr) {
    Fail(ErrorCode::kInvalidArgument,
         "scheme '" + std::string(SchemeName(scheme.kind)) +
             "' needs a target policy");
  }
  if (scheme.kind == SchemeKind::kMrdr) {
    return MrdrWeights(samples, *target, scheme.seed);
  }
  std::vector<double> z(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    const LoggedSample& s = samples[i];
    const double pi =
        needs_target ? target->Probability(s.context, s.action) : 0.0;
    z[i] = SchemeWeight(scheme.kind, pi, s.propensity);
  }
  return z;
}

RewardPredictor::RewardPredictor(int num_actions, int feature_dim,
                                 Eigen::VectorXd weights, double reg,
                                 SchemeKind scheme, bool clamp)
    : num_actions_(num_actions),
      feature_dim_(feature_dim),
      weights_(std::move(weights)),
      reg_(reg),
      scheme_(scheme),
      clamp_(clamp) {
  if (weights_.size() != static_cast<Eigen::Index>(num_actions_) *
                             (feature_dim_ + 1)) {
    Fail(ErrorCode::kLengthMismatch, "predictor weight length mismatch");
  }
}

RewardPredictor RewardPredictor::Zero(int num_actions, int feature_dim) {
  return RewardPredictor(
      num_actions, feature_dim,
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_actions) *
                            (feature_dim + 1)),
      0.0, SchemeKind::kZeroPredictor);
}

double RewardPredictor::Predict(const Context& x, int action) const {
  if (static_cast<int>(x.features.size()) != feature_dim_) {
    Fail(ErrorCode::kLengthMismatch, "context feature length mismatch");
  }
  const Eigen::Index offset =
      static_cast<Eigen::Index>(action) * (feature_dim_ + 1);
  double value = weights_[offset + feature_dim_];
  for (int j = 0; j < feature_dim_; ++j) {
    value += weights_[offset + j] * x.features[j];
  }
  return clamp_ ? std::clamp(value, 0.0, 1.0) : value;
}

void RewardPredictor::PredictAll(const Context& x,
                                 std::span<double> out) const {
  for (int a = 0; a < num_actions_; ++a) out[a] = Predict(x, a);
}

std::string RewardPredictor::ToJson() const {
  nlohmann::json out = {
      {"num_actions", num_actions_},
      {"feature_dim", feature_dim_},
      {"weights",
       std::vector<double>(weights_.data(), weights_.data() + weights_.size())},
      {"reg", reg_},
      {"scheme", std::string(SchemeName(scheme_))},
      {"clamp", clamp_}};
  return out.dump();
}

RewardPredictor RewardPredictor::FromJson(std::string_view json) {
  try {
    const auto parsed = nlohmann::json::parse(json);
    const auto w = parsed.at("weights").get<std::vector<double>>();
    return RewardPredictor(
        parsed.at("num_actions").get<int>(), parsed.at("feature_dim").get<int>(),
        Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()),
        parsed.at("reg").get<double>(),
        ParseScheme(parsed.at("scheme").get<std::string>()),
        parsed.at("clamp").get<bool>());
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParseError, std::string("predictor JSON: ") + e.what());
  }
}

RewardPredictor FitWeightedRidge(std::span<const LoggedSample> samples,
                                 std::span<const double> z, int num_actions,
                                 int feature_dim, double reg,
                                 SchemeKind scheme) {
  if (samples.size() != z.size()) {
    Fail(ErrorCode::kLengthMismatch, "one weight per sample required");
  }
  if (!(reg >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "ridge strength must be >= 0");
  }
  if (samples.empty()) Fail(ErrorCode::kEmptyDataset, "no training samples");
  const int block = feature_dim + 1;
  const double inv_m = 1.0 / static_cast<double>(samples.size());

  std::vector<Eigen::MatrixXd> normal(num_actions,
                                      Eigen::MatrixXd::Zero(block, block));
  std::vector<Eigen::VectorXd> rhs(num_actions, Eigen::VectorXd::Zero(block));
  Eigen::VectorXd phi(block);
  for (size_t j = 0; j < samples.size(); ++j) {
    const LoggedSample& s = samples[j];
    if (s.action < 0 || s.action >= num_actions) {
      Fail(ErrorCode::kIndexOutOfRange, "logged action out of range");
    }
    if (static_cast<int>(s.context.features.size()) != feature_dim) {
      Fail(ErrorCode::kLengthMismatch, "context feature length mismatch");
    }
    if (!(z[j] >= 0.0) || !std::isfinite(z[j])) {
      Fail(ErrorCode::kInvalidArgument, "regression weights must be >= 0");
    }
    if (z[j] == 0.0) continue;
    for (int f = 0; f < feature_dim; ++f) phi[f] = s.context.features[f];
    phi[feature_dim] = 1.0;
    normal[s.action].selfadjointView<Eigen::Lower>().rankUpdate(
        phi, z[j] * inv_m);
    rhs[s.action] += (z[j] * s.reward * inv_m) * phi;
  }

  Eigen::VectorXd theta(static_cast<Eigen::Index>(num_actions) * block);
  for (int a = 0; a < num_actions; ++a) {
    Eigen::MatrixXd A = normal[a].selfadjointView<Eigen::Lower>();
    A.diagonal().array() += reg;
    const Eigen::VectorXd& b = rhs[a];
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    const Eigen::VectorXd diag = ldlt.vectorD().cwiseAbs();
    const double scale = diag.size() > 0 ? diag.maxCoeff() : 0.0;
    if (ldlt.info() != Eigen::Success ||
        (block > 0 && diag.minCoeff() <= 1e-12 * std::max(scale, 1e-300))) {
      Fail(ErrorCode::kSingularSystem,
           "normal matrix for action " + std::to_string(a) +
               " is singular; use reg > 0");
    }
    Eigen::VectorXd x = ldlt.solve(b);
    // Iterative refinement until the residual meets the 1e-8 contract.
    const double tol = 1e-8 * std::max(1.0, b.cwiseAbs().maxCoeff());
    for (int pass = 0; pass < 3; ++pass) {
      const Eigen::VectorXd residual = b - A * x;
      if (residual.cwiseAbs().maxCoeff() <= tol) break;
      x += ldlt.solve(residual);
    }
    if ((b - A * x).cwiseAbs().maxCoeff() > tol) {
      Fail(ErrorCode::kSingularSystem,
           "ridge solve did not reach residual tolerance");
    }
    theta.segment(static_cast<Eigen::Index>(a) * block, block) = x;
  }
  return RewardPredictor(num_actions, feature_dim, std::move(theta), reg,
                         scheme);
}

RewardPredictor FitWeightedRidge(std::span<const LoggedSample> samples,
                                 const WeightScheme& scheme,
                                 const Policy* target, int num_actions,
                                 int feature_dim, double reg) {
  if (scheme.kind == SchemeKind::kZeroPredictor) {
    return RewardPredictor::Zero(num_actions, feature_dim);
  }
  const std::vector<double> z = SchemeWeights(samples, scheme, target);
  return FitWeightedRidge(samples, z, num_actions, feature_dim, reg,
                          scheme.kind);
}

double WeightedLoss(const RewardPredictor& predictor,
                    std::span<const LoggedSample> samples,
                    std::span<const double> z) {
  if (samples.size() != z.size()) {
    Fail(ErrorCode::kLengthMismatch, "one weight per sample required");
  }
  if (samples.empty()) Fail(ErrorCode::kEmptyDataset, "no samples");
  double total = 0.0;
  for (size_t j = 0; j < samples.size(); ++j) {
    const double residual =
        samples[j].reward - predictor.Predict(samples[j].context,
                                              samples[j].action);
    total += z[j] * residual * residual;
  }
  return total / static_cast<double>(samples.size());
}

}  // namespace ope
