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

#include "ope/slate.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "ope/error.h"
#include "ope/model_selection.h"
#include "ope/random.h"

namespace ope {
namespace {

constexpr double kMinRcond = 1e-10;
constexpr int kSlateGridPoints = 15;

void ValidateTuple(std::span<const int> items, int num_items) {
  std::vector<bool> seen(num_items > 0 ? num_items : 0, false);
  for (int item : items) {
    if (item < 0 || item >= num_items) {
      Fail(ErrorCode::kIndexOutOfRange,
           "item " + std::to_string(item) + " outside [0, " +
               std::to_string(num_items) + ")");
    }
    if (seen[item]) {
      Fail(ErrorCode::kDuplicateItem,
           "item " + std::to_string(item) + " listed twice");
    }
    seen[item] = true;
  }
}

}  // namespace

Eigen::VectorXd LhotEncode(std::span<const int> items, int num_items) {
  ValidateTuple(items, num_items);
  const int l = static_cast<int>(items.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(l * num_items);
  for (int j = 0; j < l; ++j) out[j * num_items + items[j]] = 1.0;
  return out;
}

Eigen::VectorXd NdcgCoefficients(std::span<const double> relevances,
                                 int slate_length) {
  const int m = static_cast<int>(relevances.size());
  if (slate_length < 1 || slate_length > m) {
    Fail(ErrorCode::kInvalidArgument, "slate length outside [1, m]");
  }
  std::vector<double> sorted(relevances.begin(), relevances.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double ideal = 0.0;
  for (int j = 0; j < slate_length; ++j) {
    ideal += (std::exp2(sorted[j]) - 1.0) / std::log2(j + 2.0);
  }
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(slate_length * m);
  if (ideal <= 0.0) return eta;
  for (int j = 0; j < slate_length; ++j) {
    const double discount = std::log2(j + 2.0);
    for (int i = 0; i < m; ++i) {
      eta[j * m + i] = (std::exp2(relevances[i]) - 1.0) / discount / ideal;
    }
  }
  return eta;
}

double Ndcg(std::span<const double> relevances, std::span<const int> items) {
  const int m = static_cast<int>(relevances.size());
  ValidateTuple(items, m);
  const int l = static_cast<int>(items.size());
  std::vector<double> sorted(relevances.begin(), relevances.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double ideal = 0.0;
  double dcg = 0.0;
  for (int j = 0; j < l; ++j) {
    const double discount = std::log2(j + 2.0);
    ideal += (std::exp2(sorted[j]) - 1.0) / discount;
    dcg += (std::exp2(relevances[items[j]]) - 1.0) / discount;
  }
  return ideal > 0.0 ? dcg / ideal : 0.0;
}

std::vector<SlateTuple> BasisTuples(int slate_length, int num_items) {
  const int l = slate_length;
  const int m = num_items;
  if (l < 1 || l > m) {
    Fail(ErrorCode::kInvalidArgument, "basis needs 1 <= l <= m");
  }
  if (l == m && l > 1) {
    Fail(ErrorCode::kInvalidArgument,
         "basis construction needs a spare item (l < m) when l > 1");
  }
  SlateTuple greedy(l);
  for (int i = 0; i < l; ++i) greedy[i] = i;

  std::vector<SlateTuple> out = {greedy};
  for (int i = 1; i < l; ++i) {
    SlateTuple a = greedy;
    a[0] = i;
    a[i] = 0;
    out.push_back(a);
  }
  for (int j = l; j < m; ++j) {
    SlateTuple a = greedy;
    a[0] = j;
    out.push_back(a);
  }
  for (int i = 1; i < l; ++i) {
    for (int i2 = 1; i2 < l; ++i2) {
      if (i2 == i) continue;
      SlateTuple a = greedy;
      a[0] = i;
      a[i] = i2;
      a[i2] = 0;
      out.push_back(a);
    }
    for (int j = l; j < m; ++j) {
      SlateTuple a = greedy;
      a[0] = i;
      a[i] = j;
      out.push_back(a);
    }
  }
  for (int i = 1; i < l; ++i) {
    SlateTuple a = greedy;
    a[0] = l;
    a[i] = 0;
    out.push_back(a);
  }
  return out;
}

SlateBasis::SlateBasis(int slate_length, int num_items,
                       std::vector<SlateTuple> tuples)
    : slate_length_(slate_length),
      num_items_(num_items),
      tuples_(std::move(tuples)) {
  if (tuples_.empty()) Fail(ErrorCode::kInvalidArgument, "empty basis");
  matrix_.resize(static_cast<Eigen::Index>(slate_length_) * num_items_,
                 static_cast<Eigen::Index>(tuples_.size()));
  for (size_t c = 0; c < tuples_.size(); ++c) {
    if (static_cast<int>(tuples_[c].size()) != slate_length_) {
      Fail(ErrorCode::kLengthMismatch, "basis tuple of the wrong length");
    }
    matrix_.col(static_cast<Eigen::Index>(c)) =
        LhotEncode(tuples_[c], num_items_);
  }
  const Eigen::MatrixXd gram = matrix_.transpose() * matrix_;
  gram_.compute(gram);
  if (gram_.info() != Eigen::Success || gram_.rcond() < kMinRcond) {
    Fail(ErrorCode::kRankDeficient,
         "basis columns are not linearly independent");
  }
}

SlateBasis SlateBasis::Build(int slate_length, int num_items) {
  return SlateBasis(slate_length, num_items,
                    BasisTuples(slate_length, num_items));
}

std::pair<Eigen::VectorXd, double> SlateBasis::Solve(
    const Eigen::VectorXd& q) const {
  if (q.size() != matrix_.rows()) {
    Fail(ErrorCode::kLengthMismatch, "q has the wrong length");
  }
  Eigen::VectorXd v = gram_.solve(matrix_.transpose() * q);
  const double residual = (matrix_ * v - q).cwiseAbs().maxCoeff();
  return {std::move(v), residual};
}

Eigen::VectorXd ComputeQ(
    std::span<const std::pair<SlateTuple, double>> target, int num_items) {
  if (target.empty()) Fail(ErrorCode::kInvalidArgument, "empty target");
  Eigen::VectorXd q;
  double total = 0.0;
  for (const auto& [tuple, prob] : target) {
    if (!(prob >= 0.0)) {
      Fail(ErrorCode::kInvalidArgument, "negative slate probability");
    }
    const Eigen::VectorXd a = LhotEncode(tuple, num_items);
    if (q.size() == 0) q = Eigen::VectorXd::Zero(a.size());
    if (a.size() != q.size()) {
      Fail(ErrorCode::kLengthMismatch, "slates of different lengths");
    }
    q += prob * a;
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(ErrorCode::kInvalidArgument, "slate probabilities must sum to 1");
  }
  return q;
}

double SlateContextState::PiWeight(int basis_index) const {
  if (basis_index < 0 || basis_index >= static_cast<int>(mu.size())) {
    Fail(ErrorCode::kIndexOutOfRange, "basis index out of range");
  }
  if (!(mu[basis_index] > 0.0)) {
    Fail(ErrorCode::kZeroPropensity, "basis column has zero probability");
  }
  return v[basis_index] / mu[basis_index];
}

SlateContextState PrepareContext(const SlateBasis& basis,
                                 const Eigen::VectorXd& q,
                                 std::vector<double> mu) {
  if (static_cast<int>(mu.size()) != basis.size()) {
    Fail(ErrorCode::kLengthMismatch, "one logging probability per column");
  }
  ValidateDistribution(mu);
  SlateContextState state;
  auto [v, residual] = basis.Solve(q);
  if (residual > kSpanTolerance) {
    Fail(ErrorCode::kSpanViolation,
         "target mean action leaves the span of the logging support "
         "(residual " + std::to_string(residual) + ")");
  }
  state.q = q;
  state.v = std::move(v);
  state.mu = std::move(mu);
  state.v_l1 = state.v.lpNorm<1>();
  state.residual = residual;
  return state;
}

std::vector<double> DefaultEpsilons() {
  return {0.5, 0.25, 0.125, 0.0625, 0.03125};
}

double DrawEpsilon(std::span<const double> epsilons, uint64_t seed,
                   int64_t context_id) {
  if (epsilons.empty()) Fail(ErrorCode::kInvalidArgument, "no epsilons");
  const double u =
      HashToUnit(DeriveSeed(seed, static_cast<uint64_t>(context_id)));
  size_t index = static_cast<size_t>(u * static_cast<double>(epsilons.size()));
  if (index >= epsilons.size()) index = epsilons.size() - 1;
  return epsilons[index];
}

std::vector<double> EpsilonGreedyDistribution(int basis_size, double epsilon) {
  if (basis_size < 1) Fail(ErrorCode::kInvalidArgument, "empty basis");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "epsilon outside [0, 1]");
  }
  if (basis_size == 1) return {1.0};
  std::vector<double> mu(basis_size, epsilon / (basis_size - 1));
  mu[0] = 1.0 - epsilon;
  return mu;
}

EvalTable BuildSlateEvalTable(std::span<const LoggedSlateSample> samples,
                              std::span<const SlateContextState* const> states,
                              std::span<const Eigen::VectorXd> eta_hat,
                              const SlateBasis& basis) {
  if (samples.empty()) Fail(ErrorCode::kEmptyDataset, "no slate samples");
  if (states.size() != samples.size() || eta_hat.size() != samples.size()) {
    Fail(ErrorCode::kLengthMismatch, "one state and prediction per sample");
  }
  const size_t n = samples.size();
  EvalTable table;
  table.num_actions = basis.size();
  table.dm.resize(n);
  table.weight.resize(n);
  table.residual.resize(n);
  table.sample_z.assign(n, 1.0);
  for (size_t i = 0; i < n; ++i) {
    const LoggedSlateSample& s = samples[i];
    const SlateContextState& state = *states[i];
    if (s.basis_index < 0 || s.basis_index >= basis.size()) {
      Fail(ErrorCode::kSpanViolation,
           "logged slate outside the basis (index " +
               std::to_string(s.basis_index) + ")");
    }
    if (eta_hat[i].size() != basis.matrix().rows()) {
      Fail(ErrorCode::kLengthMismatch, "prediction has the wrong length");
    }
    table.dm[i] = eta_hat[i].dot(state.q);
    table.weight[i] = state.PiWeight(s.basis_index);
    table.residual[i] =
        s.reward - eta_hat[i].dot(basis.matrix().col(s.basis_index));
  }
  return table;
}

EstimateBreakdown DrsPiEstimate(const EvalTable& table, double lambda) {
  if (!(lambda >= 0.0)) Fail(ErrorCode::kInvalidArgument, "lambda < 0");
  return DrsEstimate(table, WeightMap{ShrinkKind::kOptimistic, lambda});
}

std::vector<double> SlateLambdaGrid(std::span<const double> weights) {
  if (weights.empty()) {
    Fail(ErrorCode::kDegenerateWeights, "no weights to build a grid from");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) {
      Fail(ErrorCode::kDegenerateWeights, "weights must be finite");
    }
  }
  const double q05 = Quantile(weights, 0.05);
  const double q95 = Quantile(weights, 0.95);
  double lo = std::min(0.01 * q05 * q05, 100.0 * q95 * q95);
  const double hi = std::max(0.01 * q05 * q05, 100.0 * q95 * q95);
  std::vector<double> grid;
  if (hi > 0.0) {
    if (lo <= 0.0) lo = hi * 1e-6;
    const double log_lo = std::log(lo);
    const double log_hi = std::log(hi);
    for (int j = 0; j < kSlateGridPoints; ++j) {
      double value;
      if (j == 0) {
        value = lo;
      } else if (j == kSlateGridPoints - 1) {
        value = hi;
      } else {
        value = std::exp(log_lo +
                         (log_hi - log_lo) * j / (kSlateGridPoints - 1));
      }
      if (grid.empty() || value != grid.back()) grid.push_back(value);
    }
  }
  grid.push_back(1e-50);
  grid.push_back(1e30);
  return grid;
}

}  // namespace ope
