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

#ifndef OPE_STATS_H_
#define OPE_STATS_H_

#include <span>
#include <vector>

namespace ope {

double Mean(std::span<const double> values);

// mean((v - truth)^2).
double Mse(std::span<const double> estimates, double truth);

// mean(min((v - truth)^2, 1)).
double ClippedMse(std::span<const double> estimates, double truth);

// min((v - truth)^2, 1) per replicate.
std::vector<double> ClippedSquaredErrors(std::span<const double> estimates,
                                         double truth);

// I_x(a, b), evaluated with the Lentz continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(T <= t) for Student's t with `df` degrees of freedom.
double StudentTCdf(double t, double df);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-sided
};

// Paired t-test on a - b with df = n - 1. Identical inputs give t = 0,
// p = 1; a constant nonzero difference gives t = +-inf, p = 0.
TTestResult PairedTTest(std::span<const double> a, std::span<const double> b);

struct CdfPoint {
  double ratio = 0.0;
  double cdf = 0.0;
};

// Sorted ratios mse[c] / baseline[c] with empirical CDF values i / N.
std::vector<CdfPoint> RelativeMseCdf(std::span<const double> mse,
                                     std::span<const double> baseline);

// Fraction of ratios <= x.
double CdfAt(std::span<const CdfPoint> cdf, double x);

}  // namespace ope

#endif  // OPE_STATS_H_
