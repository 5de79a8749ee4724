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

#ifndef OPE_FEATURES_H_
#define OPE_FEATURES_H_

#include <memory>
#include <span>
#include <vector>

#include "ope/data.h"

namespace ope {

// A joint featurization f(x, a) of context-action pairs.
class ActionFeaturizer {
 public:
  virtual ~ActionFeaturizer() = default;

  virtual int num_actions() const = 0;
  virtual int dim() const = 0;
  // Writes f(x, action) into `out` (dim() entries).
  virtual void Featurize(const Context& x, int action,
                         std::span<double> out) const = 0;
};

// One block of (d + 1) coordinates per action: the context features followed
// by a per-action intercept, placed in block `action`, zeros elsewhere.
// Length k * (d + 1).
class JointFeaturizer : public ActionFeaturizer {
 public:
  JointFeaturizer(int num_actions, int feature_dim);

  int num_actions() const override { return num_actions_; }
  int dim() const override { return num_actions_ * (feature_dim_ + 1); }
  int feature_dim() const { return feature_dim_; }
  void Featurize(const Context& x, int action,
                 std::span<double> out) const override;

 private:
  int num_actions_;
  int feature_dim_;
};

std::vector<double> JointFeaturize(const Context& x, int action,
                                   int num_actions);

}  // namespace ope

#endif  // OPE_FEATURES_H_
