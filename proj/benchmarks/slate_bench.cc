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


#include <benchmark/benchmark.h>

#include <vector>

#include "ope/random.h"
#include "ope/slate.h"

namespace ope {
namespace {

void BM_BuildBasis(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(SlateBasis::Build(l, m).size());
  }
}
BENCHMARK(BM_BuildBasis)->Args({2, 5})->Args({5, 20})->Args({10, 50});

void BM_PrepareContext(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const SlateBasis basis = SlateBasis::Build(l, m);
  const std::vector<std::pair<SlateTuple, double>> target = {
      {basis.tuples().front(), 1.0}};
  const Eigen::VectorXd q = ComputeQ(target, m);
  const std::vector<double> mu(basis.size(), 1.0 / basis.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(PrepareContext(basis, q, mu).v_l1);
  }
}
BENCHMARK(BM_PrepareContext)->Args({2, 5})->Args({5, 20});

}  // namespace
}  // namespace ope
