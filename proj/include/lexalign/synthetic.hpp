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

#ifndef LEXALIGN_SYNTHETIC_HPP_
#define LEXALIGN_SYNTHETIC_HPP_

// Synthetic lexical systems with known structure, for tests, benchmarks and
// the `synth` subcommand.
//
// Each word i has a latent vector z_i ~ N(0, I_r). Modality m maps it through
// a fixed random matrix A_m (d_m x r, entries N(0, 1/r)); with probability
// 1 - shared the word instead gets an independent latent draw for that
// modality. Exemplars are center + spread * N(0, I_d), where spread is
// multiplied by verb_spread_factor for verbs.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lexalign/data_model.hpp"
#include "lexalign/rng.hpp"

namespace lexalign {

struct SyntheticConfig {
  std::string name = "synthetic";
  std::size_t n_nouns = 20;
  std::size_t n_verbs = 0;
  std::size_t dim_visual = 16;
  std::size_t dim_linguistic = 16;
  std::size_t latent_dim = 8;
  std::size_t n_visual = 20;
  std::size_t n_linguistic = 20;
  double visual_spread = 1.0;
  double linguistic_spread = 1.0;
  double verb_spread_factor = 1.0;
  // 1 = both modalities share each word's latent (aligned), 0 = independent.
  double shared = 1.0;
  std::uint64_t seed = 1;
};

inline LexicalSystem GenerateSystem(const SyntheticConfig& config) {
  LexicalSystem system;
  system.name = config.name;
  system.dim_visual = config.dim_visual;
  system.dim_linguistic = config.dim_linguistic;
  const std::size_t r = config.latent_dim;
  const std::size_t n = config.n_nouns + config.n_verbs;

  auto random_map = [&](std::size_t d, std::uint64_t stream) {
    SplitMix64 rng(DeriveSeed(config.seed, stream));
    std::vector<double> map(d * r);
    const double scale = 1.0 / std::sqrt(static_cast<double>(r));
    for (double& v : map) v = scale * rng.Normal();
    return map;
  };
  const std::vector<double> map_v = random_map(config.dim_visual, 1);
  const std::vector<double> map_l = random_map(config.dim_linguistic, 2);

  auto project = [&](const std::vector<double>& map, std::size_t d,
                     const std::vector<double>& z) {
    Vector out(d, 0.0);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < r; ++b) out[a] += map[a * r + b] * z[b];
    return out;
  };
  auto latent = [&](SplitMix64& rng) {
    std::vector<double> z(r);
    for (double& v : z) v = rng.Normal();
    return z;
  };

  for (std::size_t w = 0; w < n; ++w) {
    WordEntry entry;
    const bool verb = w >= config.n_nouns;
    entry.type = verb ? WordType::kVerb : WordType::kNoun;
    entry.word = (verb ? "verb" : "noun") +
                 std::to_string(verb ? w - config.n_nouns : w);
    SplitMix64 rng(DeriveSeed(config.seed, 3, w));
    const std::vector<double> z = latent(rng);
    std::vector<double> z_v = z, z_l = z;
    if (rng.Uniform() >= config.shared) z_v = latent(rng);
    if (rng.Uniform() >= config.shared) z_l = latent(rng);
    const Vector center_v = project(map_v, config.dim_visual, z_v);
    const Vector center_l = project(map_l, config.dim_linguistic, z_l);
    const double factor = verb ? config.verb_spread_factor : 1.0;
    for (std::size_t e = 0; e < config.n_visual; ++e) {
      Vector x = center_v;
      for (double& v : x) v += factor * config.visual_spread * rng.Normal();
      entry.visual.push_back(std::move(x));
    }
    for (std::size_t e = 0; e < config.n_linguistic; ++e) {
      Vector x = center_l;
      for (double& v : x) v += factor * config.linguistic_spread * rng.Normal();
      entry.linguistic.push_back(std::move(x));
    }
    system.words.push_back(std::move(entry));
  }
  return system;
}

}  // namespace lexalign

#endif  // LEXALIGN_SYNTHETIC_HPP_
