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

#ifndef LEXALIGN_RNG_HPP_
#define LEXALIGN_RNG_HPP_

// Reproducible random streams. Every Monte Carlo task owns a SplitMix64
// stream whose seed is derived from the master seed and the task's indices,
// so results never depend on scheduling or on the number of workers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace lexalign {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output finalizer (Stafford variant 13).
constexpr std::uint64_t Mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// DeriveSeed(s, i) = Mix64(s ^ Mix64(i + gamma)). Folded left for more
// indices: DeriveSeed(s, i, j) == DeriveSeed(DeriveSeed(s, i), j).
constexpr std::uint64_t DeriveSeed(std::uint64_t seed) noexcept { return seed; }

template <typename... Rest>
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index,
                                   Rest... rest) noexcept {
  const std::uint64_t next = Mix64(seed ^ Mix64(index + kGoldenGamma));
  return DeriveSeed(next, static_cast<std::uint64_t>(rest)...);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    state_ += kGoldenGamma;
    return Mix64(state_);
  }

  // Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  std::uint64_t Below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m =
        static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate is cached.
  double Normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = Uniform();
    while (u1 == 0.0) u1 = Uniform();
    const double u2 = Uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Fisher-Yates, drawing swap positions from the back.
template <typename T>
void Shuffle(std::span<T> values, SplitMix64& rng) noexcept {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = rng.Below(i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace lexalign

#endif  // LEXALIGN_RNG_HPP_
