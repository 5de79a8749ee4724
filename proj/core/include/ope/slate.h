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

#ifndef OPE_SLATE_H_
#define OPE_SLATE_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ope/estimators.h"

namespace ope {

// A ranked list of l distinct items out of m.
using SlateTuple = std::vector<int>;

// l-hot vector of length l * m: block j holds a single 1 at items[j].
// Throws DuplicateItem or IndexOutOfRange.
Eigen::VectorXd LhotEncode(std::span<const int> items, int num_items);

// DCG(a) / DCG* with DCG = sum_j (2^rel(i_j) - 1) / log2(j + 1) over the
// listed positions and DCG* the DCG of the top-l relevances in descending
// order. 0 when DCG* = 0.
double Ndcg(std::span<const double> relevances, std::span<const int> items);

// Per-position NDCG coefficients eta with NDCG(a) = eta . lhot(a).
Eigen::VectorXd NdcgCoefficients(std::span<const double> relevances,
                                 int slate_length);

// The basis action tuples in construction order, starting from the greedy
// list [0, 1, ..., l-1]: single swaps of the top slot with another greedy
// slot, replacements of the top slot by a non-greedy item, double moves
// through the top slot, and the rotations that put item l on top.
std::vector<SlateTuple> BasisTuples(int slate_length, int num_items);

// A linearly independent action set with its matrix B (columns are l-hot
// vectors) and a Cholesky factorization of K = B^T B.
class SlateBasis {
 public:
  // Columns must be linearly independent (reciprocal condition estimate of
  // K at least 1e-10), else RankDeficient.
  SlateBasis(int slate_length, int num_items, std::vector<SlateTuple> tuples);

  // Uses BasisTuples; size 1 + l (m - 1).
  static SlateBasis Build(int slate_length, int num_items);

  int slate_length() const { return slate_length_; }
  int num_items() const { return num_items_; }
  int size() const { return static_cast<int>(tuples_.size()); }
  const std::vector<SlateTuple>& tuples() const { return tuples_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  // v = K^{-1} B^T q and the residual ||B v - q||_inf.
  std::pair<Eigen::VectorXd, double> Solve(const Eigen::VectorXd& q) const;

 private:
  int slate_length_;
  int num_items_;
  std::vector<SlateTuple> tuples_;
  Eigen::MatrixXd matrix_;
  Eigen::LLT<Eigen::MatrixXd> gram_;
};

// Target mean action q = E_pi[a | x] for a policy given as (tuple,
// probability) pairs.
Eigen::VectorXd ComputeQ(
    std::span<const std::pair<SlateTuple, double>> target, int num_items);

// Residual bound on ||B v - q||_inf above which the target leaves the span
// of the logging support.
inline constexpr double kSpanTolerance = 1e-6;

struct SlateContextState {
  Eigen::VectorXd q;
  Eigen::VectorXd v;
  std::vector<double> mu;  // logging probabilities over basis columns
  double v_l1 = 0.0;
  double residual = 0.0;

  // Pseudo-inverse weight w^T a_i = v[i] / mu[i] of basis column i.
  double PiWeight(int basis_index) const;
};

// Solves for v and validates mu. Throws SpanViolation when the residual
// exceeds kSpanTolerance.
SlateContextState PrepareContext(const SlateBasis& basis,
                                 const Eigen::VectorXd& q,
                                 std::vector<double> mu);

// The slate epsilons {2^-1, ..., 2^-5}.
std::vector<double> DefaultEpsilons();

// Epsilon for a context, uniform over `epsilons`, from (seed, context id).
double DrawEpsilon(std::span<const double> epsilons, uint64_t seed,
                   int64_t context_id);

// 1 - eps on column 0 (the greedy list) and eps / (s - 1) elsewhere; a
// single column gets probability 1.
std::vector<double> EpsilonGreedyDistribution(int basis_size, double epsilon);

struct LoggedSlateSample {
  int64_t context_id = 0;
  double epsilon = 0.0;
  int basis_index = 0;
  double reward = 0.0;
  double propensity = 1.0;
};

// Per-sample quantities of DR-PI: dm_i = eta_hat_i . q_i,
// weight_i = v[b_i] / mu[b_i] and residual_i = r_i - eta_hat_i . a_i.
// states[i] and eta_hat[i] describe the context of sample i.
EvalTable BuildSlateEvalTable(std::span<const LoggedSlateSample> samples,
                              std::span<const SlateContextState* const> states,
                              std::span<const Eigen::VectorXd> eta_hat,
                              const SlateBasis& basis);

// DRs-PI with the optimistic factor c = lambda / (lambda + w^2) applied to
// w = v[b_i] / mu[b_i]: lambda = inf is DR-PI and lambda = 0 the direct
// term alone.
EstimateBreakdown DrsPiEstimate(const EvalTable& table, double lambda);

// 15 geometric points between 0.01 * q05^2 and 100 * q95^2 of the logged
// weights, then the boundary values 1e-50 and 1e30.
std::vector<double> SlateLambdaGrid(std::span<const double> weights);

}  // namespace ope

#endif  // OPE_SLATE_H_
