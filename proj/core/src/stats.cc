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

#include "ope/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ope/error.h"

namespace ope {
namespace {

constexpr int kMaxFractionTerms = 10000;
constexpr double kFractionEps = 1e-16;
constexpr double kTiny = 1e-300;

void RequireNonEmpty(std::span<const double> values) {
  if (values.empty()) Fail(ErrorCode::kEmptyDataset, "no estimates");
}

// Continued fraction for I_x(a, b) (modified Lentz), valid for
// x < (a + 1) / (a + b + 2).
double BetaFraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxFractionTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kFractionEps) return h;
  }
  Fail(ErrorCode::kNonConvergence, "incomplete beta fraction did not converge");
}

}  // namespace

double Mean(std::span<const double> values) {
  RequireNonEmpty(values);
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double Mse(std::span<const double> estimates, double truth) {
  RequireNonEmpty(estimates);
  double total = 0.0;
  for (double v : estimates) total += (v - truth) * (v - truth);
  return total / static_cast<double>(estimates.size());
}

std::vector<double> ClippedSquaredErrors(std::span<const double> estimates,
                                         double truth) {
  std::vector<double> out(estimates.size());
  for (size_t i = 0; i < estimates.size(); ++i) {
    const double err = (estimates[i] - truth) * (estimates[i] - truth);
    out[i] = std::min(err, 1.0);
  }
  return out;
}

double ClippedMse(std::span<const double> estimates, double truth) {
  RequireNonEmpty(estimates);
  return Mean(ClippedSquaredErrors(estimates, truth));
}

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "incomplete beta needs a, b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "incomplete beta needs x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaFraction(b, a, 1.0 - x) / b;
}

double StudentTCdf(double t, double df) {
  if (!(df > 0.0)) Fail(ErrorCode::kInvalidArgument, "df must be > 0");
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double tail =
      0.5 * RegularizedIncompleteBeta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult PairedTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kLengthMismatch, "paired samples differ in length");
  }
  const size_t n = a.size();
  if (n < 2) Fail(ErrorCode::kTooFewSamples, "paired t-test needs n >= 2");
  std::vector<double> diff(n);
  for (size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean = Mean(diff);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double nd = static_cast<double>(n);
  const double sd = std::sqrt(ss / (nd - 1.0));
  TTestResult out;
  if (sd == 0.0) {
    if (mean == 0.0) return out;
    out.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    out.p = 0.0;
    return out;
  }
  out.t = mean / (sd / std::sqrt(nd));
  const double df = nd - 1.0;
  out.p = RegularizedIncompleteBeta(0.5 * df, 0.5, df / (df + out.t * out.t));
  return out;
}

std::vector<CdfPoint> RelativeMseCdf(std::span<const double> mse,
                                     std::span<const double> baseline) {
  if (mse.size() != baseline.size()) {
    Fail(ErrorCode::kLengthMismatch, "condition sets differ");
  }
  std::vector<double> ratios(mse.size());
  for (size_t c = 0; c < mse.size(); ++c) {
    if (!(baseline[c] > 0.0)) {
      Fail(ErrorCode::kInvalidArgument,
           "baseline MSE of condition " + std::to_string(c) + " is not > 0");
    }
    ratios[c] = mse[c] / baseline[c];
  }
  std::sort(ratios.begin(), ratios.end());
  std::vector<CdfPoint> out(ratios.size());
  const double total = static_cast<double>(ratios.size());
  for (size_t i = 0; i < ratios.size(); ++i) {
    out[i] = {ratios[i], static_cast<double>(i + 1) / total};
  }
  return out;
}

double CdfAt(std::span<const CdfPoint> cdf, double x) {
  if (cdf.empty()) return 0.0;
  size_t count = 0;
  for (const CdfPoint& point : cdf) {
    if (point.ratio <= x) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(cdf.size());
}

}  // namespace ope
