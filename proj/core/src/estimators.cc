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

#include "ope/estimators.h"

#include <string>

#include "ope/error.h"

namespace ope {
namespace {

double Mean(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

void RequireNonEmpty(const EvalTable& table) {
  if (table.size() == 0) Fail(ErrorCode::kEmptyDataset, "no samples");
}

double ActionZ(SchemeKind kind, double pi, double mu, bool is_reference) {
  if (kind == SchemeKind::kMrdr) {
    return is_reference ? (1.0 - mu) / (mu * mu) : 0.0;
  }
  return SchemeWeight(kind, pi, mu);
}

}  // namespace

std::string_view ShrinkKindName(ShrinkKind kind) {
  switch (kind) {
    case ShrinkKind::kIdentity: return "identity";
    case ShrinkKind::kPessimistic: return "pessimistic";
    case ShrinkKind::kOptimistic: return "optimistic";
    case ShrinkKind::kZero: return "zero";
    case ShrinkKind::kSwitch: return "switch";
  }
  return "identity";
}

ShrinkKind ParseShrinkKind(std::string_view name) {
  for (ShrinkKind kind :
       {ShrinkKind::kIdentity, ShrinkKind::kPessimistic,
        ShrinkKind::kOptimistic, ShrinkKind::kZero, ShrinkKind::kSwitch}) {
    if (ShrinkKindName(kind) == name) return kind;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown shrinkage kind '" + std::string(name) + "'");
}

double ShrinkPessimistic(double w, double lambda) {
  return lambda < w ? lambda : w;
}

double ShrinkOptimistic(double w, double lambda) {
  if (lambda == kInfinity) return w;
  if (lambda == 0.0 || w == 0.0) return 0.0;
  return w * (lambda / (w * w + lambda));
}

double WeightMap::Apply(double w) const {
  switch (kind) {
    case ShrinkKind::kIdentity: return w;
    case ShrinkKind::kPessimistic: return ShrinkPessimistic(w, lambda);
    case ShrinkKind::kOptimistic: return ShrinkOptimistic(w, lambda);
    case ShrinkKind::kZero: return 0.0;
    case ShrinkKind::kSwitch: return w <= lambda ? w : 0.0;
  }
  return w;
}

EvalTable BuildEvalTable(std::span<const LoggedSample> samples,
                         const Policy& target, const RewardPredictor& predictor,
                         const Policy* logging, const WeightScheme* scheme) {
  if (samples.empty()) Fail(ErrorCode::kEmptyDataset, "no samples");
  const int k = target.num_actions();
  if (predictor.num_actions() != k ||
      (logging != nullptr && logging->num_actions() != k)) {
    Fail(ErrorCode::kInvalidArgument, "action counts disagree");
  }
  const WeightScheme z_scheme =
      scheme != nullptr ? *scheme : WeightScheme{predictor.scheme(), 0};
  const size_t n = samples.size();

  EvalTable table;
  table.num_actions = k;
  table.dm.resize(n);
  table.weight.resize(n);
  table.residual.resize(n);
  table.sample_z.resize(n);
  if (logging != nullptr) {
    table.target_probs.resize(n * k);
    table.logging_probs.resize(n * k);
    table.action_z.resize(n * k);
  }
  std::vector<double> pi(k), mu(k), eta(k);
  for (size_t i = 0; i < n; ++i) {
    const LoggedSample& s = samples[i];
    if (s.action < 0 || s.action >= k) {
      Fail(ErrorCode::kIndexOutOfRange, "logged action out of range");
    }
    target.Distribution(s.context, pi);
    predictor.PredictAll(s.context, eta);
    double dm = 0.0;
    for (int a = 0; a < k; ++a) dm += pi[a] * eta[a];
    table.dm[i] = dm;
    if (s.propensity > 0.0) {
      table.weight[i] = pi[s.action] / s.propensity;
    } else if (pi[s.action] > 0.0) {
      Fail(ErrorCode::kAbsoluteContinuityViolation,
           "zero propensity on an action the target plays (context " +
               std::to_string(s.context.id) + ")");
    } else {
      table.weight[i] = 0.0;
    }
    table.residual[i] = s.reward - eta[s.action];

    int reference = -1;
    if (z_scheme.kind == SchemeKind::kMrdr) {
      reference = MrdrReferenceAction(pi, z_scheme.seed, i);
    }
    table.sample_z[i] =
        s.propensity > 0.0 ? ActionZ(z_scheme.kind, pi[s.action],
                                     s.propensity, reference == s.action)
                           : 0.0;
    if (logging != nullptr) {
      logging->Distribution(s.context, mu);
      for (int a = 0; a < k; ++a) {
        const size_t idx = i * k + a;
        table.target_probs[idx] = pi[a];
        table.logging_probs[idx] = mu[a];
        table.action_z[idx] =
            mu[a] > 0.0 ? ActionZ(z_scheme.kind, pi[a], mu[a], reference == a)
                        : 0.0;
      }
    }
  }
  return table;
}

EstimateBreakdown DmEstimate(const EvalTable& table) {
  RequireNonEmpty(table);
  EstimateBreakdown out;
  out.terms = table.dm;
  out.value = Mean(out.terms);
  out.dm_component = out.value;
  out.correction_component = 0.0;
  return out;
}

EstimateBreakdown DmEstimate(std::span<const LoggedSample> samples,
                             const Policy& target,
                             const RewardPredictor& predictor) {
  return DmEstimate(BuildEvalTable(samples, target, predictor));
}

EstimateBreakdown DrsEstimate(const EvalTable& table, const WeightMap& map,
                              bool self_normalized) {
  RequireNonEmpty(table);
  const size_t n = table.size();
  std::vector<double> shrunk(n);
  for (size_t i = 0; i < n; ++i) shrunk[i] = map.Apply(table.weight[i]);
  if (self_normalized) {
    double total = 0.0;
    for (double v : shrunk) total += v;
    const double scale = total > 0.0 ? static_cast<double>(n) / total : 0.0;
    for (double& v : shrunk) v *= scale;
  }
  EstimateBreakdown out;
  out.terms.resize(n);
  std::vector<double> correction(n);
  for (size_t i = 0; i < n; ++i) {
    correction[i] = shrunk[i] * table.residual[i];
    out.terms[i] = table.dm[i] + correction[i];
  }
  out.value = Mean(out.terms);
  out.dm_component = Mean(table.dm);
  out.correction_component = Mean(correction);
  return out;
}

EstimateBreakdown DrsEstimate(std::span<const LoggedSample> samples,
                              const Policy& target,
                              const RewardPredictor& predictor,
                              const WeightMap& map, bool self_normalized) {
  return DrsEstimate(BuildEvalTable(samples, target, predictor), map,
                     self_normalized);
}

EstimateBreakdown SwitchDrEstimate(const EvalTable& table, double tau) {
  if (!(tau >= 0.0)) Fail(ErrorCode::kInvalidArgument, "tau must be >= 0");
  return DrsEstimate(table, WeightMap{ShrinkKind::kSwitch, tau});
}

EstimateBreakdown SwitchDrEstimate(std::span<const LoggedSample> samples,
                                   const Policy& target,
                                   const RewardPredictor& predictor,
                                   double tau) {
  return SwitchDrEstimate(BuildEvalTable(samples, target, predictor), tau);
}

}  // namespace ope
