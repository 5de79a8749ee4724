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

// Acceptance checks for the ope-shrink toolkit. Prints one PASS/FAIL line
// per criterion and exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "fixtures.h"
#include "json.hpp"
#include "ope/estimators.h"
#include "ope/experiment.h"
#include "ope/features.h"
#include "ope/learning.h"
#include "ope/model_selection.h"
#include "ope/random.h"
#include "ope/simulation.h"
#include "ope/slate.h"
#include "ope/slate_experiment.h"
#include "ope/stats.h"

namespace ope {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

std::vector<LoggedSample> Unwrap(std::span<const testing::WeightedSample> d) {
  std::vector<LoggedSample> out;
  for (const auto& w : d) out.push_back(w.sample);
  return out;
}

// 1. Exact expectation of IPS and DR over every draw sequence of n = 2.
Outcome Unbiasedness() {
  const auto inst = testing::MakeEnumerableInstance();
  const auto draws = testing::SingleDraws(inst);
  const double truth =
      TruePolicyValue(*inst.target, inst.data, RewardMode::kDeterministic);
  Eigen::VectorXd w(9);
  w << 0.9, 0.1, -0.3, 0.0, 0.5, 0.5, 0.2, -0.1, 0.05;
  const std::vector<RewardPredictor> predictors = {
      RewardPredictor::Zero(3, 2), inst.predictor,
      RewardPredictor(3, 2, w, 0.0, SchemeKind::kConst1)};
  double worst = 0.0;
  for (const RewardPredictor& p : predictors) {
    const auto m = testing::EnumerateMoments(
        draws, 2, [&](std::span<const LoggedSample> s) {
          return DrsEstimate(s, *inst.target, p, WeightMap{}).value;
        });
    worst = std::max(worst, std::abs(m.mean - truth));
  }
  return {worst <= 1e-12,
          Format("max |E[V_hat] - V| = %.3g over IPS and 2 DR predictors", worst)};
}

// 2. lambda = 0 is DM and lambda = inf is DR, bitwise.
Outcome Endpoints() {
  std::vector<std::pair<std::vector<LoggedSample>, PolicyPtr>> cases;
  std::vector<const Policy*> loggings;
  const auto inst = testing::MakeEnumerableInstance();
  cases.push_back({Unwrap(testing::SingleDraws(inst)), inst.target});
  loggings.push_back(inst.logging.get());
  std::vector<std::shared_ptr<UniformPolicy>> keep;
  std::vector<FullInfoDataset> datasets;
  for (uint64_t seed : {1, 2}) {
    datasets.push_back(MakeSyntheticDataset(
        {.num_rows = 500, .num_actions = 3 + static_cast<int>(seed), .seed = seed}));
  }
  for (const FullInfoDataset& data : datasets) {
    const PreparedDataset prepared = PrepareDataset("d", data, 3);
    const PolicyPtr target = MakePolicy(prepared, {PolicyBase::kPi1, 0.9, 0.0}, 4);
    const PolicyPtr logging = MakePolicy(prepared, {PolicyBase::kPi2, 0.5, 0.2}, 5);
    cases.push_back(
        {SupervisedToBandit(data, *logging, 400, RewardMode::kStochastic, 6),
         target});
    loggings.push_back(logging.get());
    // Keep the policies alive alongside the samples.
    static std::vector<PolicyPtr> alive;
    alive.push_back(logging);
  }
  int checked = 0;
  int mismatches = 0;
  for (size_t c = 0; c < cases.size(); ++c) {
    const auto& [samples, target] = cases[c];
    const int k = target->num_actions();
    const int d = static_cast<int>(samples.front().context.features.size());
    for (SchemeKind scheme :
         {SchemeKind::kZeroPredictor, SchemeKind::kConst1, SchemeKind::kW,
          SchemeKind::kWSquared, SchemeKind::kMrdr, SchemeKind::kInvMu,
          SchemeKind::kInvMuSquared}) {
      const std::vector<LoggedSample> train(samples.begin(),
                                            samples.begin() + samples.size() / 2);
      const WeightScheme ws{scheme, 7};
      const RewardPredictor p =
          FitWeightedRidge(train, ws, target.get(), k, d, 1.0);
      const EvalTable table = BuildEvalTable(samples, *target, p, loggings[c]);
      const double dm = DmEstimate(table).value;
      const double dr = DrsEstimate(table, WeightMap{}).value;
      for (ShrinkKind kind : {ShrinkKind::kOptimistic, ShrinkKind::kPessimistic}) {
        mismatches += DrsEstimate(table, WeightMap{kind, 0.0}).value != dm;
        mismatches += DrsEstimate(table, WeightMap{kind, kInfinity}).value != dr;
        checked += 2;
      }
      mismatches += SwitchDrEstimate(table, kInfinity).value != dr;
      ++checked;
    }
  }
  return {mismatches == 0,
          std::to_string(checked) + " endpoint identities over " +
              std::to_string(cases.size()) + " datasets x 7 predictors, " +
              std::to_string(mismatches) + " mismatches"};
}

// 3. |Var - proxy / n| <= 1 / n by enumeration.
Outcome SecondMomentProxy() {
  const auto inst = testing::MakeEnumerableInstance();
  const auto draws = testing::SingleDraws(inst);
  const int n = 2;
  std::vector<double> weights;
  for (const auto& d : draws) {
    weights.push_back(inst.target->Probability(d.sample.context, d.sample.action) /
                      d.sample.propensity);
  }
  double worst_ratio = 0.0;
  int maps = 0;
  for (ShrinkKind kind : {ShrinkKind::kOptimistic, ShrinkKind::kPessimistic}) {
    // Ten points: eight spread over the data grid plus the 0 and inf ends.
    const std::vector<double> full = LambdaGrid(weights, kind);
    std::vector<double> grid;
    const size_t interior = full.size() - 2;
    for (int j = 0; j < 8; ++j) grid.push_back(full[j * (interior - 1) / 7]);
    grid.push_back(0.0);
    grid.push_back(kInfinity);
    for (double lambda : grid) {
      const WeightMap map{kind, lambda};
      double proxy = 0.0;
      for (size_t i = 0; i < draws.size(); ++i) {
        const auto& s = draws[i].sample;
        const double res = s.reward - inst.predictor.Predict(s.context, s.action);
        const double shrunk = map.Apply(weights[i]);
        proxy += draws[i].prob * shrunk * shrunk * res * res;
      }
      const auto m = testing::EnumerateMoments(
          draws, n, [&](std::span<const LoggedSample> s) {
            return DrsEstimate(s, *inst.target, inst.predictor, map).value;
          });
      worst_ratio = std::max(worst_ratio, std::abs(m.variance - proxy / n) * n);
      ++maps;
    }
  }
  return {worst_ratio <= 1.0,
          Format("max n |Var - proxy/n| = %.4g (bound 1) over %.0f maps",
                 worst_ratio, maps)};
}

std::vector<LoggedSlateSample> UnwrapSlate(
    std::span<const testing::WeightedSlateSample> d) {
  std::vector<LoggedSlateSample> out;
  for (const auto& w : d) out.push_back(w.sample);
  return out;
}

// 4. Slate variance vs shrunk second moment, and closed-form weights.
Outcome SlateProxyAndWeights() {
  const auto inst = testing::MakeSlateInstance();
  const auto draws = testing::SingleSlateDraws(inst);
  const int n = 2;
  double v_l1_sq = 0.0;
  for (const auto& st : inst.states) {
    v_l1_sq += st.v_l1 * st.v_l1 / static_cast<double>(inst.states.size());
  }
  auto table_of = [&](std::span<const LoggedSlateSample> s) {
    std::vector<const SlateContextState*> states;
    std::vector<Eigen::VectorXd> eta_hat;
    for (const auto& x : s) {
      states.push_back(&inst.states[x.context_id]);
      eta_hat.push_back(inst.eta_hat[x.context_id]);
    }
    return BuildSlateEvalTable(s, states, eta_hat, inst.basis);
  };
  const EvalTable all = table_of(UnwrapSlate(draws));
  std::vector<double> grid = SlateLambdaGrid(all.weight);
  grid.push_back(0.0);
  grid.push_back(kInfinity);
  double worst = 0.0;
  for (double lambda : grid) {
    double proxy = 0.0;
    for (size_t i = 0; i < draws.size(); ++i) {
      const double shrunk = ShrinkOptimistic(all.weight[i], lambda);
      proxy += draws[i].prob * shrunk * shrunk * all.residual[i] * all.residual[i];
    }
    double m1 = 0.0, m2 = 0.0;
    for (const auto& a : draws) {
      for (const auto& b : draws) {
        const std::vector<LoggedSlateSample> s = {a.sample, b.sample};
        const double v = DrsPiEstimate(table_of(s), lambda).value;
        m1 += a.prob * b.prob * v;
        m2 += a.prob * b.prob * v * v;
      }
    }
    worst = std::max(worst, std::abs(n * (m2 - m1 * m1) - proxy) / v_l1_sq);
  }

  double weight_err = 0.0;
  Rng rng(404);
  std::vector<std::pair<SlateBasis, SlateContextState>> instances;
  for (const auto& st : inst.states) instances.push_back({inst.basis, st});
  for (auto [l, m] : {std::pair{2, 3}, std::pair{2, 5}, std::pair{3, 6}}) {
    const SlateBasis basis = SlateBasis::Build(l, m);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> mu(basis.size());
      double total = 0.0;
      for (double& p : mu) total += (p = 0.05 + rng.Uniform());
      for (double& p : mu) p /= total;
      std::vector<std::pair<SlateTuple, double>> target;
      for (int t = 0; t < 3; ++t) {
        std::vector<int> items(m);
        std::iota(items.begin(), items.end(), 0);
        std::shuffle(items.begin(), items.end(), rng.engine());
        items.resize(l);
        target.push_back({items, 1.0 / 3.0});
      }
      instances.push_back(
          {basis, PrepareContext(basis, ComputeQ(target, m), std::move(mu))});
    }
  }
  for (const auto& [basis, state] : instances) {
    const auto oracle = testing::ExplicitPseudoInverseWeights(basis, state);
    for (int i = 0; i < basis.size(); ++i) {
      weight_err = std::max(weight_err, std::abs(state.PiWeight(i) - oracle[i]));
    }
  }
  return {worst <= 1.0 && weight_err <= 1e-8,
          Format("max |n Var - proxy| / E||v||^2 = %.4g over %.0f lambdas; "
                 "max closed-form vs pinv weight gap %.3g",
                 worst, static_cast<double>(grid.size()), weight_err)};
}

// 5. Basis sizes and independence.
Outcome BasisSize() {
  const SlateBasis big = SlateBasis::Build(5, 20);
  bool ok = big.size() == 96 &&
            Eigen::FullPivLU<Eigen::MatrixXd>(big.matrix()).rank() == 96;
  Rng rng(55);
  int pairs = 0;
  for (; pairs < 10; ++pairs) {
    const int m = 2 + static_cast<int>(rng.UniformInt(19));
    const int l = 1 + static_cast<int>(rng.UniformInt(m - 1));
    const SlateBasis basis = SlateBasis::Build(l, m);
    ok = ok && basis.size() == 1 + l * (m - 1) &&
         Eigen::FullPivLU<Eigen::MatrixXd>(basis.matrix()).rank() == basis.size();
  }
  return {ok, "basis(5, 20) has " + std::to_string(big.size()) +
                  " independent actions; 10 random (l, m) pairs match 1 + l(m-1)"};
}

struct EvaluationRun {
  std::vector<ConditionResult> results;
  double seconds = 0.0;
};

// The six conditions shared by criteria 6 and 7.
const EvaluationRun& SharedEvaluation() {
  static const EvaluationRun run = [] {
    const auto start = std::chrono::steady_clock::now();
    std::vector<PreparedDataset> datasets;
    datasets.push_back(PrepareDataset(
        "syn-a",
        MakeSyntheticDataset({.num_rows = 2000, .num_actions = 4,
                              .feature_dim = 8, .seed = 21}),
        31));
    datasets.push_back(PrepareDataset(
        "syn-b",
        MakeSyntheticDataset({.num_rows = 2000, .num_actions = 6,
                              .feature_dim = 10, .separation = 0.7,
                              .seed = 22}),
        32));
    std::vector<ConditionSpec> conditions;
    for (size_t d = 0; d < datasets.size(); ++d) {
      for (const PolicyParams& logging :
           {PolicyParams{PolicyBase::kPi1, 0.5, 0.2},
            PolicyParams{PolicyBase::kUniform, 0.0, 0.0},
            PolicyParams{PolicyBase::kPi2, 0.5, 0.2}}) {
        ConditionSpec spec;
        spec.id = "c" + std::to_string(conditions.size());
        spec.dataset = d;
        spec.target = {PolicyBase::kPi1, 0.9, 0.0};
        spec.logging = logging;
        spec.n = 2000;
        spec.replicates = 500;
        spec.seed = DeriveSeed(2024, conditions.size());
        conditions.push_back(spec);
      }
    }
    EvaluationOptions options;
    options.roster = {ParseRosterEntry("DM:z1"), ParseRosterEntry("DR:w2"),
                      ParseRosterEntry("DRs-direct"),
                      ParseRosterEntry("DRs-oracle")};
    options.candidate_schemes = {SchemeKind::kZeroPredictor,
                                 SchemeKind::kConst1, SchemeKind::kWSquared};
    EvaluationRun out;
    out.results = RunEvaluation(datasets, conditions, options);
    out.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    return out;
  }();
  return run;
}

// 6. Oracle-tuned DRs never loses to DM or DR in clipped MSE.
Outcome OracleDominance() {
  const EvaluationRun& run = SharedEvaluation();
  int ok = 0;
  std::string worst;
  for (const ConditionResult& r : run.results) {
    const double dm = ClippedMse(r.Estimates(0), r.truth);
    const double dr = ClippedMse(r.Estimates(1), r.truth);
    const double oracle = ClippedMse(r.Estimates(3), r.truth);
    ok += oracle <= std::min(dm, dr);
  }
  const auto n = static_cast<int>(run.results.size());
  return {ok == n && run.seconds < 120.0,
          std::to_string(ok) + "/" + std::to_string(n) +
              " conditions with oracle <= min(DM, DR); evaluation took " +
              Format("%.1f s", run.seconds)};
}

// 7. DRs-direct stays within 1.25x of DR on at least 5 of 6 conditions.
Outcome SelectionSanity() {
  const EvaluationRun& run = SharedEvaluation();
  int ok = 0;
  double worst = 0.0;
  for (const ConditionResult& r : run.results) {
    const double dr = ClippedMse(r.Estimates(1), r.truth);
    const double drs = ClippedMse(r.Estimates(2), r.truth);
    ok += drs <= 1.25 * dr;
    worst = std::max(worst, drs / dr);
  }
  return {ok >= 5, std::to_string(ok) + "/6 conditions with DRs-direct <= 1.25 DR" +
                       Format(" (largest ratio %.3f)", worst)};
}

// 8. O(n) variance of the mean vs the pairwise form, and its expectation.
Outcome VarianceEstimator() {
  Rng rng(808);
  double gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> z(2 + rng.UniformInt(80));
    for (double& v : z) v = rng.Normal() * 2.0 + 0.5;
    double pairs = 0.0;
    for (double a : z) {
      for (double b : z) pairs += (a - b) * (a - b);
    }
    const double n = static_cast<double>(z.size());
    const double pairwise = pairs / (2.0 * n * (n - 1.0)) / n;
    gap = std::max(gap, std::abs(SampleVarianceOfMean(z) - pairwise));
  }
  // Exponential draws: Var = 1, so Var / n = 0.02 at n = 50.
  const int draws = 5000, n = 50;
  std::vector<double> est(draws);
  for (double& e : est) {
    std::vector<double> z(n);
    for (double& v : z) v = -std::log1p(-rng.Uniform());
    e = SampleVarianceOfMean(z);
  }
  const double mean = std::accumulate(est.begin(), est.end(), 0.0) / draws;
  double ss = 0.0;
  for (double e : est) ss += (e - mean) * (e - mean);
  const double se = std::sqrt(ss / (draws - 1) / draws);
  const double z_score = std::abs(mean - 1.0 / n) / se;
  return {gap <= 1e-12 && z_score <= 3.0,
          Format("pairwise gap %.3g; mean estimate %.5f vs 0.02 (%.2f SE)", gap,
                 mean, z_score)};
}

// 9. Analytic learning gradients vs central differences.
Outcome Gradients() {
  const std::vector<LoggedSample> samples = {
      {{0, {0.5, -1.0}}, 0, 1.0, 0.5}, {{1, {1.2, 0.3}}, 2, 0.0, 0.2},
      {{2, {-0.4, 0.9}}, 1, 1.0, 0.3}, {{3, {0.7, 0.1}}, 2, 1.0, 0.6},
      {{4, {2.0, -0.5}}, 1, 0.0, 0.25}};
  Eigen::VectorXd w(9);
  w << 0.1, -0.1, 0.4, 0.2, 0.1, 0.3, -0.2, 0.0, 0.5;
  const LearningProblem problem(samples,
                                RewardPredictor(3, 2, w, 1.0, SchemeKind::kConst1),
                                std::make_shared<JointFeaturizer>(3, 2));
  Rng rng(909);
  double worst = 0.0;
  for (ShrinkKind kind : {ShrinkKind::kOptimistic, ShrinkKind::kPessimistic}) {
    for (double lambda : {0.0, 1.0, kInfinity}) {
      const LearningSpec spec{WeightMap{kind, lambda}, 1e-3};
      for (int point = 0; point < 20; ++point) {
        Eigen::VectorXd u(problem.dim());
        for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = rng.Normal();
        worst = std::max(worst, GradientRelativeError(
                                    problem.Gradient(u, spec),
                                    FiniteDifferenceGradient(problem, u, spec)));
      }
    }
  }
  return {worst <= 1e-5,
          Format("max relative error %.3g over 120 points", worst)};
}

// 10. Slate shrinkage benefit at desk scale.
Outcome SlateBenefit() {
  const RelevanceData rel = MakeSyntheticRelevance({.seed = 1010});
  const SlateEnvironment env = BuildSlateEnvironment(
      rel, {.slate_length = 2, .num_items = 5, .seed = 1011});
  SlateRunOptions options;
  options.sample_sizes = {500, 2000};
  options.replicates = 20;
  options.seed = 1012;
  const auto rows = RunSlateExperiment(env, options);
  std::map<std::tuple<RewardMode, std::string, size_t>, std::map<std::string, double>>
      cells;
  for (const auto& row : rows) {
    cells[{row.reward_mode, row.predictor, row.n}][row.estimator] = row.mse;
  }
  bool never_worse = true;
  std::map<RewardMode, bool> factor_ok;
  double best_ratio = kInfinity;
  for (const auto& [key, mse] : cells) {
    const double dr = mse.at("DR-PI");
    const double oracle = mse.at("DRs-PI-oracle");
    never_worse = never_worse && oracle <= dr;
    const RewardMode mode = std::get<0>(key);
    if (std::get<2>(key) == options.sample_sizes.front()) {
      const bool ok = oracle <= dr / 1.5;
      factor_ok[mode] = (factor_ok.count(mode) ? factor_ok[mode] : true) && ok;
      best_ratio = std::min(best_ratio, oracle / dr);
    }
  }
  bool any_mode = false;
  for (const auto& [mode, ok] : factor_ok) any_mode = any_mode || ok;
  return {never_worse && any_mode,
          std::string(never_worse ? "oracle <= DR-PI in every cell"
                                  : "oracle > DR-PI in some cell") +
              Format("; smallest oracle / DR-PI ratio at n = 500: %.3f",
                     best_ratio)};
}

std::map<std::string, std::string> Snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[entry.path().filename().string()] = ss.str();
  }
  return files;
}

// 11. CLI outputs are byte-identical across reruns and thread counts.
Outcome Determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ope_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  using nlohmann::json;
  const std::map<std::string, json> configs = {
      {"evaluate",
       {{"schema_version", 1},
        {"seed", 11},
        {"datasets",
         {{{"id", "syn"},
           {"synthetic", {{"num_rows", 600}, {"num_actions", 4}}}}}},
        {"conditions",
         {{"loggings", {"pi1(0.5,0.2)", "uniform"}},
          {"reward_modes", {"deterministic", "stochastic"}},
          {"n", {300}},
          {"replicates", 8}}}}},
      {"slate",
       {{"schema_version", 1},
        {"seed", 12},
        {"relevance",
         {{"synthetic", {{"num_queries", 120}, {"docs_per_query", 12}}}}},
        {"slate_length", 3},
        {"num_items", 8},
        {"scorer_fraction", 0.2},
        {"sample_sizes", {200}},
        {"replicates", 4},
        {"write_logs", true}}},
      {"learn",
       {{"schema_version", 1},
        {"seed", 13},
        {"replicates", 2},
        {"gammas", {1e-3, 1e-2}},
        {"lambdas", {0.0, 10.0}},
        {"max_iterations", 100},
        {"dataset",
         {{"id", "syn"},
          {"synthetic", {{"num_rows", 600}, {"num_actions", 3}}}}}}}};
  int identical = 0;
  std::string failures;
  for (const auto& [command, config] : configs) {
    const fs::path path = dir / (command + ".json");
    std::ofstream(path) << config.dump();
    std::vector<std::map<std::string, std::string>> snapshots;
    for (const char* threads : {"1", "1", "3"}) {
      const fs::path out = dir / (command + "_" + std::to_string(snapshots.size()));
      std::ostringstream sink;
      const int code = cli::RunCli({command, "--config", path.string(), "--out",
                                    out.string(), "--threads", threads},
                                   sink, sink);
      if (code != cli::kExitOk) {
        failures += " " + command + " exited " + std::to_string(code);
        break;
      }
      snapshots.push_back(Snapshot(out));
    }
    if (snapshots.size() == 3 && snapshots[0] == snapshots[1] &&
        snapshots[0] == snapshots[2] && !snapshots[0].empty()) {
      ++identical;
    } else if (snapshots.size() == 3) {
      failures += " " + command + " differs";
    }
  }
  fs::remove_all(dir);
  return {identical == 3,
          std::to_string(identical) +
              "/3 commands byte-identical across reruns and --threads 1/3" +
              failures};
}

}  // namespace
}  // namespace ope

int main() {
  using ope::Outcome;
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
    double budget_seconds;
  };
  const Criterion criteria[] = {
      {1, "unbiasedness-oracle", ope::Unbiasedness, 1.0},
      {2, "endpoint-identities", ope::Endpoints, 0.0},
      {3, "second-moment-proxy", ope::SecondMomentProxy, 1.0},
      {4, "slate-proxy-and-pinv-weights", ope::SlateProxyAndWeights, 5.0},
      {5, "basis-size", ope::BasisSize, 0.0},
      {6, "oracle-tuning-dominance", ope::OracleDominance, 0.0},
      {7, "model-selection-sanity", ope::SelectionSanity, 0.0},
      {8, "variance-estimator", ope::VarianceEstimator, 0.0},
      {9, "gradient-correctness", ope::Gradients, 10.0},
      {10, "slate-shrinkage-benefit", ope::SlateBenefit, 0.0},
      {11, "determinism", ope::Determinism, 0.0},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (c.budget_seconds > 0.0 && seconds >= c.budget_seconds) {
      outcome.pass = false;
      outcome.detail += " (over the time budget)";
    }
    failed += !outcome.pass;
    std::printf("%s %d %s: %s [%.2f s]\n", outcome.pass ? "PASS" : "FAIL", c.id,
                c.name, outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
