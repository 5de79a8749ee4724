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

#ifndef OPE_RANDOM_H_
#define OPE_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>

namespace ope {

// Stafford's "Mix13" finalizer as used by SplitMix64.
uint64_t SplitMix64(uint64_t x);

// Seed for an independent stream `index` under a master seed:
// seed XOR hash(index). Execution order never enters the derivation.
uint64_t DeriveSeed(uint64_t seed, uint64_t index);

// Deterministic value in [0, 1) obtained by hashing `key`.
double HashToUnit(uint64_t key);

// Thin wrapper over std::mt19937_64. The distribution transforms are written
// out explicitly (the std:: distributions are implementation-defined), so a
// seed reproduces the same stream on every standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();
  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);
  bool Bernoulli(double p) { return Uniform() < p; }
  // Standard normal via Box-Muller.
  double Normal();
  // Index drawn from an unnormalized nonnegative weight vector.
  int Categorical(std::span<const double> probs);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ope

#endif  // OPE_RANDOM_H_
