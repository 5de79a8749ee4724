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

#ifndef OPE_REWARD_MODEL_H_
#define OPE_REWARD_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ope/data.h"
#include "ope/features.h"
#include "ope/policy.h"

namespace ope {

// Training weights z(x, a) for the reward regression.
enum class SchemeKind {
  kConst1,        // z = 1
  kW,             // z = w
  kWSquared,      // z = w^2
  kMrdr,          // z = 1{a = pi(x)} (1 - mu) / mu^2
  kInvMu,         // z = 1 / mu
  kInvMuSquared,  // z = 1 / mu^2
  kZeroPredictor  // no regression: eta_hat = 0
};

// Short names used in configs and reports: z1, w, w2, mrdr, inv_mu, inv_mu2,
// zero.
std::string_view SchemeName(SchemeKind kind);
SchemeKind ParseScheme(std::string_view name);

struct WeightScheme {
  SchemeKind kind = SchemeKind::kConst1;
  // Seeds the per-sample reference-action draws of MRDR under a stochastic
  // target.
  uint64_t seed = 0;
};

// z for the target-independent and w-based kinds at one (x, a) pair with
// target probability pi and logging probability mu. The zero predictor uses
// z = 1 (it is only consulted by the optimistic bias bound).
double SchemeWeight(SchemeKind kind, double pi, double mu);

// The MRDR reference action for row `index`: the target's action when pi is
// one-hot, otherwise a draw from pi seeded by (seed, index).
int MrdrReferenceAction(std::span<const double> pi, uint64_t seed,
                        uint64_t index);

// Per-sample MRDR weights z_i = 1{a_i = a~_i} (1 - mu_i) / mu_i^2.
std::vector<double> MrdrWeights(std::span<const LoggedSample> samples,
                                const Policy& target, uint64_t seed);

// Per-sample z for any scheme. `target` may be null for the kinds that do
// not depend on it (z1, inv_mu, inv_mu2, zero).
std::vector<double> SchemeWeights(std::span<const LoggedSample> samples,
                                  const WeightScheme& scheme,
                                  const Policy* target);

// A linear reward model over JointFeaturizer features with predictions
// clamped to [0, 1] unless clamping is switched off.
class RewardPredictor {
 public:
  RewardPredictor(int num_actions, int feature_dim, Eigen::VectorXd weights,
                  double reg, SchemeKind scheme, bool clamp = true);

  // eta_hat = 0 everywhere.
  static RewardPredictor Zero(int num_actions, int feature_dim);

  int num_actions() const { return num_actions_; }
  int feature_dim() const { return feature_dim_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double reg() const { return reg_; }
  SchemeKind scheme() const { return scheme_; }
  bool clamp() const { return clamp_; }

  double Predict(const Context& x, int action) const;
  void PredictAll(const Context& x, std::span<double> out) const;

  std::string ToJson() const;
  static RewardPredictor FromJson(std::string_view json);

 private:
  int num_actions_;
  int feature_dim_;
  Eigen::VectorXd weights_;
  double reg_;
  SchemeKind scheme_;
  bool clamp_;
};

// argmin_theta (1/m) sum_j z_j (theta . phi(x_j, a_j) - r_j)^2
//              + reg * ||theta||^2
// over the joint features. The normal matrix is block diagonal by action, so
// each block is factored separately. Throws SingularSystem when reg = 0 and
// a block is singular.
RewardPredictor FitWeightedRidge(std::span<const LoggedSample> samples,
                                 std::span<const double> z, int num_actions,
                                 int feature_dim, double reg,
                                 SchemeKind scheme = SchemeKind::kConst1);

RewardPredictor FitWeightedRidge(std::span<const LoggedSample> samples,
                                 const WeightScheme& scheme,
                                 const Policy* target, int num_actions,
                                 int feature_dim, double reg);

// L(eta_hat) estimate: (1/m) sum_j z_j (r_j - eta_hat(x_j, a_j))^2.
double WeightedLoss(const RewardPredictor& predictor,
                    std::span<const LoggedSample> samples,
                    std::span<const double> z);

}  // namespace ope

#endif  // OPE_REWARD_MODEL_H_
