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

#ifndef LEXALIGN_KERNELS_HPP_
#define LEXALIGN_KERNELS_HPP_

// Dense vector kernels with a fixed summation order. Each reduction keeps
// four partial sums (lanes k mod 4), combines them as (s0 + s1) + (s2 + s3)
// and then adds the scalar tail, so results are identical whichever SIMD
// width the compiler picks.

#include <cstddef>
#include <cstring>
#include <span>

namespace lexalign::kernels {

typedef double Lanes __attribute__((vector_size(32)));

inline Lanes Load(const double* p) {
  Lanes v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

inline double Combine(Lanes acc) {
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

inline double Dot(const double* a, const double* b, std::size_t n) {
  Lanes acc = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) acc += Load(a + k) * Load(b + k);
  double sum = Combine(acc);
  for (; k < n; ++k) sum += a[k] * b[k];
  return sum;
}

// Dot(a, b0) and Dot(a, b1) in one pass; bit-identical to two Dot calls.
inline void Dot2(const double* a, const double* b0, const double* b1,
                 std::size_t n, double& out0, double& out1) {
  Lanes acc0 = {0.0, 0.0, 0.0, 0.0};
  Lanes acc1 = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const Lanes va = Load(a + k);
    acc0 += va * Load(b0 + k);
    acc1 += va * Load(b1 + k);
  }
  double s0 = Combine(acc0);
  double s1 = Combine(acc1);
  for (; k < n; ++k) {
    s0 += a[k] * b0[k];
    s1 += a[k] * b1[k];
  }
  out0 = s0;
  out1 = s1;
}

// Same per-output arithmetic as Dot, four rows at a time.
inline void Dot4(const double* a, const double* const* b, std::size_t n,
                 double* out) {
  Lanes acc0 = {0.0, 0.0, 0.0, 0.0};
  Lanes acc1 = acc0, acc2 = acc0, acc3 = acc0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const Lanes va = Load(a + k);
    acc0 += va * Load(b[0] + k);
    acc1 += va * Load(b[1] + k);
    acc2 += va * Load(b[2] + k);
    acc3 += va * Load(b[3] + k);
  }
  out[0] = Combine(acc0);
  out[1] = Combine(acc1);
  out[2] = Combine(acc2);
  out[3] = Combine(acc3);
  for (; k < n; ++k) {
    out[0] += a[k] * b[0][k];
    out[1] += a[k] * b[1][k];
    out[2] += a[k] * b[2][k];
    out[3] += a[k] * b[3][k];
  }
}

inline double SquaredDistance(const double* a, const double* b, std::size_t n) {
  Lanes acc = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const Lanes d = Load(a + k) - Load(b + k);
    acc += d * d;
  }
  double sum = Combine(acc);
  for (; k < n; ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return sum;
}

inline void AddTo(double* acc, const double* x, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) acc[k] += x[k];
}

}  // namespace lexalign::kernels

#endif  // LEXALIGN_KERNELS_HPP_
