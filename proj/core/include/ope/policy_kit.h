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

#ifndef OPE_POLICY_KIT_H_
#define OPE_POLICY_KIT_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ope/data.h"
#include "ope/features.h"
#include "ope/policy.h"

namespace ope {

// Which context features a scorer looks at. For odd d the first half is
// [0, d/2) and the second half [d/2, d) with integer division.
enum class FeatureMask { kFirstHalf, kSecondHalf, kAll };

std::string_view FeatureMaskName(FeatureMask mask);
FeatureMask ParseFeatureMask(std::string_view name);

// Linear class scorer s(x) = W (m .* x) + b with a k x d weight matrix W,
// a 0/1 feature mask m and an optional per-class bias b.
class LinearScorer {
 public:
  LinearScorer(Eigen::MatrixXd weights, FeatureMask mask,
               Eigen::VectorXd bias = Eigen::VectorXd());

  int num_actions() const { return static_cast<int>(weights_.rows()); }
  int feature_dim() const { return static_cast<int>(weights_.cols()); }
  FeatureMask mask() const { return mask_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& bias() const { return bias_; }

  bool IsActive(int feature) const;
  void Scores(const Context& x, std::span<double> out) const;
  std::vector<double> Scores(const Context& x) const;

  // {"weights": [[...], ...], "mask": "first_half"|"second_half"|"all"}
  // plus "bias": [...] when the scorer carries an intercept.
  std::string ToJson() const;
  static LinearScorer FromJson(std::string_view json);

 private:
  Eigen::MatrixXd weights_;
  FeatureMask mask_;
  Eigen::VectorXd bias_;
};

struct LogisticOptions {
  double reg = 1.0;
  double tol = 1e-6;
  // Zero returns the all-zero initialization without a convergence check.
  int max_iterations = 10000;
};

// Minimizes (1/N) sum_i -log softmax(W x_i)[y_i] + reg * ||W||_F^2 over the
// masked features by gradient descent with Armijo backtracking. Throws
// NonConvergence if the gradient norm does not reach `tol`.
LinearScorer TrainMultinomialLogistic(const FullInfoDataset& data,
                                      FeatureMask mask,
                                      const LogisticOptions& options = {});

// Index of the largest entry; ties go to the lowest index.
int ArgMax(std::span<const double> scores);

// pi(a|x) = 1 for the argmax class of the scorer.
class DeterministicPolicy : public Policy {
 public:
  explicit DeterministicPolicy(LinearScorer scorer);

  int num_actions() const override { return scorer_.num_actions(); }
  using Policy::Distribution;
  void Distribution(const Context& x, std::span<double> out) const override;
  int Choose(const Context& x) const;
  const LinearScorer& scorer() const { return scorer_; }

 private:
  LinearScorer scorer_;
};

struct SofteningParams {
  double alpha = 1.0;
  double beta = 0.0;
  uint64_t seed = 0;
};

// Per-context noise u in [-0.5, 0.5), a pure function of (seed, context id).
double SofteningNoise(uint64_t seed, int64_t context_id);

// Softened version of a deterministic base policy: the base action gets
// alpha + beta * u and every other action (1 - alpha - beta * u) / (k - 1).
// With a single action that action always has probability one.
class SoftenedPolicy : public Policy {
 public:
  SoftenedPolicy(PolicyPtr base, SofteningParams params);

  int num_actions() const override { return base_->num_actions(); }
  using Policy::Distribution;
  void Distribution(const Context& x, std::span<double> out) const override;
  const SofteningParams& params() const { return params_; }

 private:
  PolicyPtr base_;
  SofteningParams params_;
};

// pi_u(a|x) proportional to exp(u . f(x, a)), normalized per context with
// max-subtraction.
class SoftmaxLinearPolicy : public Policy {
 public:
  SoftmaxLinearPolicy(Eigen::VectorXd parameters,
                      std::shared_ptr<const ActionFeaturizer> featurizer);

  int num_actions() const override { return featurizer_->num_actions(); }
  using Policy::Distribution;
  void Distribution(const Context& x, std::span<double> out) const override;

  const Eigen::VectorXd& parameters() const { return parameters_; }
  const ActionFeaturizer& featurizer() const { return *featurizer_; }

 private:
  Eigen::VectorXd parameters_;
  std::shared_ptr<const ActionFeaturizer> featurizer_;
};

// In-place softmax with max-subtraction.
void Softmax(std::span<double> scores);

}  // namespace ope

#endif  // OPE_POLICY_KIT_H_
