/*
 * Copyright 2026 The lexalign Authors.
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

#ifndef LEXALIGN_STATS_HPP_
#define LEXALIGN_STATS_HPP_

// Statistical helpers: rank correlation, pooled two-sample t-test with an
// exact Student-t tail, percentile intervals and the bootstrap.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexalign/error.hpp"
#include "lexalign/rng.hpp"

namespace lexalign {

inline double Mean(std::span<const double> values) {
  if (values.empty()) Fail("mean of an empty sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// Pearson correlation via centered sums. Throws when either input has zero
// variance.
inline double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) Fail("correlation inputs differ in length");
  if (x.size() < 2) Fail("correlation needs at least 2 pairs");
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    Fail("correlation is undefined for a constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> AverageRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  // Ties get averaged below, so the order among equal values is irrelevant.
  std::vector<std::pair<double, std::size_t>> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = {values[i], i};
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && sorted[end].first == sorted[start].first) ++end;
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[sorted[k].second] = rank;
    start = end;
  }
  return ranks;
}

inline double Spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) Fail("spearman: inputs differ in length");
  if (x.size() < 2) Fail("spearman: needs at least 2 pairs");
  const std::vector<double> rx = AverageRanks(x);
  const std::vector<double> ry = AverageRanks(y);
  return Pearson(rx, ry);
}

namespace internal {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIterations = 200000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  Fail("incomplete beta continued fraction did not converge");
}

// log Gamma(a + b) - log Gamma(a). For large a the two lgamma values are huge
// and nearly equal, so the Stirling series is differenced term by term.
inline double LogGammaRatio(double a, double b) {
  if (a < 50.0) return std::lgamma(a + b) - std::lgamma(a);
  auto tail = [](double z) {
    const double z2 = z * z;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * z2)) / z2) / z;
  };
  return (a - 0.5) * std::log1p(b / a) + b * std::log(a + b) - b +
         (tail(a + b) - tail(a));
}

}  // namespace internal

// Regularized incomplete beta I_x(a, b).
// I_x(a, b) given both x and y = 1 - x, so callers that know the complement
// exactly do not lose it to cancellation when x is close to 1.
inline double RegularizedIncompleteBeta(double a, double b, double x,
                                        double y) {
  if (!(a > 0.0) || !(b > 0.0)) Fail("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_x = y < 0.5 ? std::log1p(-y) : std::log(x);
  const double log_y = x < 0.5 ? std::log1p(-x) : std::log(y);
  const double log_beta = a >= b
                              ? internal::LogGammaRatio(a, b) - std::lgamma(b)
                              : internal::LogGammaRatio(b, a) - std::lgamma(a);
  const double log_front = log_beta + a * log_x + b * log_y;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * internal::BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * internal::BetaContinuedFraction(b, a, y) / b;
}

inline double RegularizedIncompleteBeta(double a, double b, double x) {
  return RegularizedIncompleteBeta(a, b, x, 1.0 - x);
}

inline double StudentTwoSidedP(double t, double df) {
  if (!(df > 0.0)) Fail("student t: df must be positive");
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  return std::clamp(RegularizedIncompleteBeta(0.5 * df, 0.5, x, y), 0.0, 1.0);
}

struct TTestResult {
  double t = 0.0;
  std::int64_t df = 0;
  double p = 1.0;
};

// Student's two-sample t-test with pooled variance, df = n_a + n_b - 2.
inline TTestResult PooledTTest(std::span<const double> a,
                               std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    Fail("t-test needs at least 2 values in each sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = Mean(a);
  const double mb = Mean(b);
  double ssa = 0.0, ssb = 0.0;
  for (double v : a) ssa += (v - ma) * (v - ma);
  for (double v : b) ssb += (v - mb) * (v - mb);
  TTestResult result;
  result.df = static_cast<std::int64_t>(a.size() + b.size()) - 2;
  const double pooled = (ssa + ssb) / static_cast<double>(result.df);
  const double diff = ma - mb;
  if (pooled == 0.0) {
    if (diff != 0.0)
      Fail("t-test is degenerate: zero pooled variance with unequal means");
    result.t = 0.0;
    result.p = 1.0;
    return result;
  }
  result.t = diff / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  result.p = StudentTwoSidedP(result.t, static_cast<double>(result.df));
  return result;
}

// Linear-interpolation quantile of sorted data (h = (n - 1) q).
inline double SortedQuantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) Fail("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Central `level` interval of the empirical distribution.
inline Interval PercentileCi(std::span<const double> samples, double level) {
  if (samples.size() < 2) Fail("percentile interval needs at least 2 samples");
  if (!(level > 0.0 && level < 1.0)) Fail("confidence level must be in (0, 1)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - level) / 2.0;
  return {SortedQuantile(sorted, tail), SortedQuantile(sorted, 1.0 - tail)};
}

// Percentile bootstrap interval for the mean. Resample r draws from its own
// stream DeriveSeed(seed, r).
inline Interval BootstrapMeanCi(std::span<const double> values,
                                std::size_t resamples, double level,
                                std::uint64_t seed) {
  if (values.empty()) Fail("bootstrap of an empty sample");
  if (resamples < 2) Fail("bootstrap needs at least 2 resamples");
  std::vector<double> means(resamples);
  const std::size_t n = values.size();
  for (std::size_t r = 0; r < resamples; ++r) {
    SplitMix64 rng(DeriveSeed(seed, r));
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += values[rng.Below(n)];
    means[r] = sum / static_cast<double>(n);
  }
  return PercentileCi(means, level);
}

// Kolmogorov-Smirnov distance between the sample and Uniform(0, 1).
inline double KsUniformStatistic(std::span<const double> samples) {
  if (samples.empty()) Fail("KS statistic of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double x = std::clamp(sorted[i], 0.0, 1.0);
    d = std::max(d, static_cast<double>(i + 1) / n - x);
    d = std::max(d, x - static_cast<double>(i) / n);
  }
  return d;
}

}  // namespace lexalign

#endif  // LEXALIGN_STATS_HPP_
