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

#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "cli.h"
#include "commands.h"
#include "ope/estimators.h"
#include "ope/learning.h"
#include "ope/model_selection.h"
#include "ope/policy_kit.h"
#include "ope/random.h"
#include "ope/reward_model.h"
#include "ope/simulation.h"
#include "ope/slate.h"

namespace ope::cli {

// A handful of fast end-to-end checks of an installed build.
int RunSelftest(uint64_t seed, std::ostream& out) {
  struct Check {
    const char* name;
    std::function<bool()> run;
  };
  const std::vector<Check> checks = {
      {"basis_size_5_of_20",
       [] { return SlateBasis::Build(5, 20).size() == 96; }},
      {"ndcg_hand_value",
       [] {
         const std::vector<double> rel = {3.0, 1.0, 0.0};
         return std::abs(Ndcg(rel, SlateTuple{1, 0}) - 0.70982) < 1e-4;
       }},
      {"drs_endpoints_match_dm_and_dr",
       [seed] {
         SyntheticSpec spec;
         spec.num_rows = 200;
         spec.seed = seed;
         const FullInfoDataset data = MakeSyntheticDataset(spec);
         const UniformPolicy logging(data.num_actions);
         const auto samples = SupervisedToBandit(
             data, logging, 300, RewardMode::kDeterministic, seed + 1);
         auto first_action = std::make_shared<DeterministicPolicy>(LinearScorer(
             Eigen::MatrixXd::Zero(data.num_actions, data.feature_dim),
             FeatureMask::kAll));
         const SoftenedPolicy target(first_action, SofteningParams{0.7, 0.0});
         const RewardPredictor predictor = FitWeightedRidge(
             samples, WeightScheme{SchemeKind::kConst1}, nullptr,
             data.num_actions, data.feature_dim, 1.0);
         const EvalTable table = BuildEvalTable(samples, target, predictor);
         const double dm = DmEstimate(table).value;
         const double dr =
             DrsEstimate(table, WeightMap{ShrinkKind::kIdentity}, false).value;
         for (ShrinkKind kind :
              {ShrinkKind::kOptimistic, ShrinkKind::kPessimistic}) {
           if (DrsEstimate(table, WeightMap{kind, 0.0}, false).value != dm ||
               DrsEstimate(table, WeightMap{kind, kInfinity}, false).value !=
                   dr) {
             return false;
           }
         }
         return true;
       }},
      {"variance_of_mean_small_case",
       [] {
         const std::vector<double> z = {1.0, 2.0, 3.0};
         return std::abs(SampleVarianceOfMean(z) - 1.0 / 3.0) < 1e-12;
       }},
      {"learning_gradient_matches_differences",
       [seed] {
         SyntheticSpec spec;
         spec.num_rows = 60;
         spec.num_actions = 3;
         spec.feature_dim = 3;
         spec.seed = seed;
         const FullInfoDataset data = MakeSyntheticDataset(spec);
         const UniformPolicy logging(3);
         auto samples = SupervisedToBandit(data, logging, 20,
                                           RewardMode::kDeterministic, seed);
         auto featurizer = std::make_shared<const JointFeaturizer>(3, 3);
         const LearningProblem problem(samples, RewardPredictor::Zero(3, 3),
                                       featurizer);
         Rng rng(seed);
         Eigen::VectorXd u(problem.dim());
         for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = 0.3 * rng.Normal();
         const LearningSpec learning{WeightMap{ShrinkKind::kOptimistic, 1.0}};
         return GradientRelativeError(
                    problem.Gradient(u, learning),
                    FiniteDifferenceGradient(problem, u, learning)) <= 1e-5;
       }},
  };
  bool ok = true;
  for (const Check& check : checks) {
    bool passed = false;
    try {
      passed = check.run();
    } catch (const std::exception& e) {
      out << "  " << check.name << " threw: " << e.what() << '\n';
    }
    out << (passed ? "PASS " : "FAIL ") << check.name << '\n';
    ok = ok && passed;
  }
  return ok ? kExitOk : kExitFailure;
}

}  // namespace ope::cli
