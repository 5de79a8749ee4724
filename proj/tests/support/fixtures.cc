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

#include "fixtures.h"

#include <cmath>

namespace ope::testing {

EnumerableInstance MakeEnumerableInstance() {
  EnumerableInstance inst;
  inst.data.num_actions = 3;
  inst.data.feature_dim = 2;
  inst.data.contexts = {{0, {0.2, -1.0}}, {1, {1.5, 0.3}}, {2, {-0.7, 0.8}}};
  inst.data.labels = {0, 2, 1};
  inst.data.expected_rewards = {
      {1.0, 0.2, 0.0}, {0.3, 0.0, 0.9}, {0.5, 1.0, 0.1}};
  inst.target = std::make_shared<TabularPolicy>(
      3, std::unordered_map<int64_t, std::vector<double>>{
             {0, {0.7, 0.2, 0.1}}, {1, {0.1, 0.1, 0.8}}, {2, {0.3, 0.3, 0.4}}});
  inst.logging = std::make_shared<TabularPolicy>(
      3, std::unordered_map<int64_t, std::vector<double>>{
             {0, {0.5, 0.3, 0.2}}, {1, {0.2, 0.2, 0.6}}, {2, {0.1, 0.6, 0.3}}});
  Eigen::VectorXd w(9);
  w << 0.1, -0.2, 0.6, 0.3, 0.1, 0.2, -0.1, 0.2, 0.5;
  inst.predictor =
      RewardPredictor(3, 2, w, 1.0, SchemeKind::kConst1, /*clamp=*/true);
  return inst;
}

std::vector<WeightedSample> SingleDraws(const EnumerableInstance& inst) {
  std::vector<WeightedSample> out;
  const double p_context = 1.0 / static_cast<double>(inst.data.size());
  for (size_t i = 0; i < inst.data.size(); ++i) {
    const Context& x = inst.data.contexts[i];
    const std::vector<double> mu = inst.logging->Distribution(x);
    for (int a = 0; a < inst.data.num_actions; ++a) {
      if (mu[a] == 0.0) continue;
      LoggedSample s{x, a, inst.data.expected_rewards[i][a], mu[a]};
      out.push_back({p_context * mu[a], s});
    }
  }
  return out;
}

Moments EnumerateMoments(
    std::span<const WeightedSample> draws, int n,
    const std::function<double(std::span<const LoggedSample>)>& f) {
  std::vector<size_t> index(n, 0);
  std::vector<LoggedSample> samples(n);
  double m1 = 0.0, m2 = 0.0;
  while (true) {
    double p = 1.0;
    for (int j = 0; j < n; ++j) {
      p *= draws[index[j]].prob;
      samples[j] = draws[index[j]].sample;
    }
    const double v = f(samples);
    m1 += p * v;
    m2 += p * v * v;
    int j = 0;
    while (j < n && ++index[j] == draws.size()) index[j++] = 0;
    if (j == n) break;
  }
  return {m1, m2 - m1 * m1};
}

SlateInstance MakeSlateInstance() {
  SlateInstance inst;
  const int m = 3;
  const std::vector<std::vector<double>> relevance = {{3, 1, 0}, {0, 2, 4}};
  const std::vector<SlateTuple> targets = {{1, 0}, {2, 1}};
  const double epsilons[] = {0.5, 0.25};
  for (size_t c = 0; c < 2; ++c) {
    inst.eta.push_back(NdcgCoefficients(relevance[c], 2));
    Eigen::VectorXd hat = inst.eta.back();
    for (Eigen::Index j = 0; j < hat.size(); ++j) {
      hat[j] = 0.8 * hat[j] + 0.05 * static_cast<double>(j % 3);
    }
    inst.eta_hat.push_back(hat);
    inst.states.push_back(PrepareContext(
        inst.basis, LhotEncode(targets[c], m),
        EpsilonGreedyDistribution(inst.basis.size(), epsilons[c])));
  }
  return inst;
}

std::vector<WeightedSlateSample> SingleSlateDraws(const SlateInstance& inst) {
  std::vector<WeightedSlateSample> out;
  const double p_context = 1.0 / static_cast<double>(inst.states.size());
  for (size_t c = 0; c < inst.states.size(); ++c) {
    const SlateContextState& st = inst.states[c];
    for (int b = 0; b < inst.basis.size(); ++b) {
      const double reward = inst.eta[c].dot(inst.basis.matrix().col(b));
      out.push_back({p_context * st.mu[b],
                     {static_cast<int64_t>(c), 0.0, b, reward, st.mu[b]}});
    }
  }
  return out;
}

std::vector<double> ExplicitPseudoInverseWeights(
    const SlateBasis& basis, const SlateContextState& state) {
  const Eigen::MatrixXd& b = basis.matrix();
  const Eigen::VectorXd mu =
      Eigen::Map<const Eigen::VectorXd>(state.mu.data(), state.mu.size());
  const Eigen::MatrixXd gamma = b * mu.asDiagonal() * b.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      gamma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  const double cutoff = 1e-10 * s[0];
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) inv[i] = 1.0 / s[i];
  }
  const Eigen::MatrixXd pinv =
      svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  const Eigen::VectorXd w = pinv * state.q;
  std::vector<double> out;
  for (Eigen::Index i = 0; i < b.cols(); ++i) out.push_back(w.dot(b.col(i)));
  return out;
}

}  // namespace ope::testing
