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

#ifndef LEXALIGN_ALIGNMENT_HPP_
#define LEXALIGN_ALIGNMENT_HPP_

// Cross-modal alignment strength: Spearman correlation between the strict
// upper triangles of the visual and linguistic cosine-similarity matrices,
// and its standing against randomly permuted word-to-word mappings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lexalign/data_model.hpp"
#include "lexalign/error.hpp"
#include "lexalign/kernels.hpp"
#include "lexalign/matrix.hpp"
#include "lexalign/metrics.hpp"
#include "lexalign/parallel.hpp"
#include "lexalign/rng.hpp"
#include "lexalign/stats.hpp"

namespace lexalign {

// Row i is the centroid of word i's selected exemplars.
inline Matrix PrototypeMatrix(const SystemView& view, Modality modality) {
  Matrix out(view.size(), view.base->dim(modality));
  for (std::size_t w = 0; w < view.size(); ++w) {
    const Vector center = ViewCentroid(view, modality, w);
    std::copy(center.begin(), center.end(), out.row(w));
  }
  return out;
}

struct SimilarityMatrix {
  std::size_t n = 0;
  Modality modality = Modality::kVisual;
  std::vector<double> values;  // n x n, symmetric

  double operator()(std::size_t i, std::size_t j) const {
    return values[i * n + j];
  }
};

// Pairwise cosine similarities. Each unordered pair is computed once and
// mirrored; the diagonal is exactly 1.
inline SimilarityMatrix CosineSimilarity(
    const Matrix& prototypes, Modality modality,
    std::span<const std::string> labels = {}) {
  const std::size_t n = prototypes.rows;
  const std::size_t d = prototypes.cols;
  if (n < 2) Fail("similarity matrix needs at least 2 rows");
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = std::sqrt(kernels::Dot(prototypes.row(i), prototypes.row(i), d));
    if (!(norms[i] > 0.0)) {
      Fail("zero-norm " + std::string(ToString(modality)) + " prototype for " +
           (i < labels.size() ? "word '" + labels[i] + "'"
                              : "row " + std::to_string(i)));
    }
  }
  SimilarityMatrix out;
  out.n = n;
  out.modality = modality;
  out.values.assign(n * n, 0.0);
  auto store = [&](std::size_t i, std::size_t j, double dot) {
    const double c = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
    out.values[i * n + j] = c;
    out.values[j * n + i] = c;
  };
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i * n + i] = 1.0;
    const double* a = prototypes.row(i);
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      const double* rows[4] = {prototypes.row(j), prototypes.row(j + 1),
                               prototypes.row(j + 2), prototypes.row(j + 3)};
      double dots[4];
      kernels::Dot4(a, rows, d, dots);
      for (std::size_t t = 0; t < 4; ++t) store(i, j + t, dots[t]);
    }
    for (; j + 2 <= n; j += 2) {
      double d0, d1;
      kernels::Dot2(a, prototypes.row(j), prototypes.row(j + 1), d, d0, d1);
      store(i, j, d0);
      store(i, j + 1, d1);
    }
    if (j < n) store(i, j, kernels::Dot(a, prototypes.row(j), d));
  }
  return out;
}

inline std::vector<std::string> WordLabels(const LexicalSystem& system) {
  std::vector<std::string> labels;
  for (const WordEntry& entry : system.words) labels.push_back(entry.word);
  return labels;
}

inline SimilarityMatrix ViewSimilarity(const SystemView& view,
                                       Modality modality) {
  return CosineSimilarity(PrototypeMatrix(view, modality), modality,
                          WordLabels(*view.base));
}

// Strict upper triangle, row-major.
inline std::vector<double> UpperTriangle(const SimilarityMatrix& m) {
  std::vector<double> out;
  out.reserve(m.n * (m.n - 1) / 2);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = i + 1; j < m.n; ++j) out.push_back(m(i, j));
  return out;
}

// Doubled average ranks of a similarity matrix's strict upper triangle
// (tied groups get an integer mean position sum), kept packed and, when
// requested, mirrored into a full n x n table for permuted lookups.
struct RankedTriangle {
  std::size_t n = 0;
  std::vector<std::int32_t> packed;
  std::vector<std::int32_t> full;
  __int128 sum = 0;
  __int128 centered = 0;  // pairs * sum of squares - sum^2
};

inline constexpr std::size_t kMaxCategories = 5000;

inline std::shared_ptr<const RankedTriangle> RankTriangle(
    const SimilarityMatrix& m, bool mirror) {
  if (m.n < 3) Fail("alignment: needs at least 3 categories");
  if (m.n > kMaxCategories) Fail("alignment: too many categories");
  auto out = std::make_shared<RankedTriangle>();
  out->n = m.n;
  const std::vector<double> ranks = AverageRanks(UpperTriangle(m));
  out->packed.resize(ranks.size());
  __int128 squares = 0;
  for (std::size_t p = 0; p < ranks.size(); ++p) {
    const auto r = static_cast<std::int32_t>(std::lround(2.0 * ranks[p]));
    out->packed[p] = r;
    out->sum += r;
    squares += static_cast<std::int64_t>(r) * r;
  }
  out->centered =
      static_cast<__int128>(ranks.size()) * squares - out->sum * out->sum;
  if (mirror) {
    out->full.assign(m.n * m.n, 0);
    std::size_t p = 0;
    for (std::size_t i = 0; i < m.n; ++i) {
      for (std::size_t j = i + 1; j < m.n; ++j, ++p) {
        out->full[i * m.n + j] = out->packed[p];
        out->full[j * m.n + i] = out->packed[p];
      }
    }
  }
  return out;
}

// Scores alignment strength under relabelings of the linguistic categories.
//
// Permuting rows and columns of a symmetric matrix only moves its
// off-diagonal entries around, so the ranks of the permuted upper triangle
// are the original ranks read at (pi(i), pi(j)). With ranks computed once,
// every permuted correlation is an exact integer sum of products.
class PermutationScorer {
 public:
  static constexpr std::size_t kMaxCategories = lexalign::kMaxCategories;

  PermutationScorer(const SimilarityMatrix& sv, const SimilarityMatrix& sl)
      : PermutationScorer(CheckedRanks(sv, sl, false),
                          RankTriangle(sl, true)) {}

  // `visual` needs only the packed ranks; `linguistic` must be mirrored.
  PermutationScorer(std::shared_ptr<const RankedTriangle> visual,
                    std::shared_ptr<const RankedTriangle> linguistic)
      : visual_(std::move(visual)), linguistic_(std::move(linguistic)) {
    if (visual_->n != linguistic_->n)
      Fail("alignment: similarity matrices differ in size");
    if (linguistic_->full.size() != linguistic_->n * linguistic_->n)
      Fail("alignment: linguistic ranks are not mirrored");
    n_ = visual_->n;
    pairs_ = n_ * (n_ - 1) / 2;
    if (visual_->centered == 0 || linguistic_->centered == 0)
      Fail("alignment: correlation is undefined for a constant upper triangle");
    denominator_ = std::sqrt(static_cast<double>(visual_->centered)) *
                   std::sqrt(static_cast<double>(linguistic_->centered));
  }

  std::size_t size() const { return n_; }

  // Alignment strength with linguistic category perm[i] paired with visual
  // category i.
  double Rho(std::span<const std::uint32_t> perm) const {
    __int128 cross = 0;
    const std::int32_t* v = visual_->packed.data();
    const std::int32_t* full = linguistic_->full.data();
    const std::uint32_t* p = perm.data();
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const std::int32_t* row = full + p[i] * n_;
      const std::uint32_t* q = p + i + 1;
      const std::size_t len = n_ - i - 1;
      // Independent partial sums keep the gathers from serializing.
      std::int64_t a0 = 0, a1 = 0, a2 = 0, a3 = 0;
      std::size_t k = 0;
      for (; k + 4 <= len; k += 4) {
        a0 += static_cast<std::int64_t>(v[k]) * row[q[k]];
        a1 += static_cast<std::int64_t>(v[k + 1]) * row[q[k + 1]];
        a2 += static_cast<std::int64_t>(v[k + 2]) * row[q[k + 2]];
        a3 += static_cast<std::int64_t>(v[k + 3]) * row[q[k + 3]];
      }
      for (; k < len; ++k) a0 += static_cast<std::int64_t>(v[k]) * row[q[k]];
      cross += (a0 + a1) + (a2 + a3);
      v += len;
    }
    const __int128 numerator = static_cast<__int128>(pairs_) * cross -
                               visual_->sum * linguistic_->sum;
    return std::clamp(static_cast<double>(numerator) / denominator_, -1.0, 1.0);
  }

  double RhoIdentity() const {
    std::vector<std::uint32_t> identity(n_);
    std::iota(identity.begin(), identity.end(), 0u);
    return Rho(identity);
  }

 private:
  static std::shared_ptr<const RankedTriangle> CheckedRanks(
      const SimilarityMatrix& sv, const SimilarityMatrix& sl, bool mirror) {
    if (sv.n != sl.n) Fail("alignment: similarity matrices differ in size");
    return RankTriangle(sv, mirror);
  }

  std::shared_ptr<const RankedTriangle> visual_;
  std::shared_ptr<const RankedTriangle> linguistic_;
  std::size_t n_ = 0;
  std::size_t pairs_ = 0;
  double denominator_ = 1.0;
};

inline double AlignmentStrength(const SimilarityMatrix& sv,
                                const SimilarityMatrix& sl) {
  return PermutationScorer(sv, sl).RhoIdentity();
}

// Uniform permutation of 0..n-1 other than the identity (fixed points are
// allowed). Rejection keeps the draw uniform over the n! - 1 candidates.
inline void RandomNonIdentityPermutation(std::span<std::uint32_t> perm,
                                         SplitMix64& rng) {
  const std::size_t n = perm.size();
  if (n < 2) Fail("no non-identity permutation of fewer than 2 items");
  for (;;) {
    std::iota(perm.begin(), perm.end(), 0u);
    Shuffle(perm, rng);
    for (std::size_t i = 0; i < n; ++i)
      if (perm[i] != i) return;
  }
}

// Permuted-mapping alignment strengths; sample p draws its permutation from
// stream DeriveSeed(seed, p).
inline std::vector<double> PermutationDistribution(
    const PermutationScorer& scorer, std::size_t n_perms, std::uint64_t seed,
    unsigned threads = 1) {
  if (n_perms == 0) Fail("permutation distribution needs n_perms >= 1");
  std::vector<double> rhos(n_perms);
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (n_perms + kChunk - 1) / kChunk;
  ParallelFor(chunks, threads, [&](std::size_t c) {
    std::vector<std::uint32_t> perm(scorer.size());
    const std::size_t end = std::min(n_perms, (c + 1) * kChunk);
    for (std::size_t p = c * kChunk; p < end; ++p) {
      SplitMix64 rng(DeriveSeed(seed, p));
      RandomNonIdentityPermutation(perm, rng);
      rhos[p] = scorer.Rho(perm);
    }
  });
  return rhos;
}

inline std::vector<double> PermutationDistribution(
    const SimilarityMatrix& sv, const SimilarityMatrix& sl,
    std::size_t n_perms, std::uint64_t seed, unsigned threads = 1) {
  return PermutationDistribution(PermutationScorer(sv, sl), n_perms, seed,
                                 threads);
}

// Fraction of permuted strengths strictly below the true strength.
inline double RelativeAlignment(double rho_true,
                                std::span<const double> permuted) {
  if (permuted.empty()) Fail("relative alignment of an empty sample");
  std::size_t below = 0;
  for (double rho : permuted)
    if (rho < rho_true) ++below;
  return static_cast<double>(below) / static_cast<double>(permuted.size());
}

// Relative alignment without materializing the sample.
inline double RelativeAlignment(const PermutationScorer& scorer,
                                double rho_true, std::size_t n_perms,
                                std::uint64_t seed,
                                std::vector<std::uint32_t>& scratch) {
  if (n_perms == 0) Fail("relative alignment needs n_perms >= 1");
  scratch.resize(scorer.size());
  std::size_t below = 0;
  for (std::size_t p = 0; p < n_perms; ++p) {
    SplitMix64 rng(DeriveSeed(seed, p));
    RandomNonIdentityPermutation(scratch, rng);
    if (scorer.Rho(scratch) < rho_true) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(n_perms);
}

// Spearman correlation between row i of both matrices, self-similarity
// excluded. Used as the per-word alignment feature.
inline double RowwiseAlignment(const SimilarityMatrix& sv,
                               const SimilarityMatrix& sl, std::size_t i) {
  if (sv.n != sl.n) Fail("rowwise alignment: matrices differ in size");
  if (sv.n < 4) Fail("rowwise alignment: needs at least 4 categories");
  if (i >= sv.n) Fail("rowwise alignment: index out of range");
  std::vector<double> a, b;
  for (std::size_t j = 0; j < sv.n; ++j) {
    if (j == i) continue;
    a.push_back(sv(i, j));
    b.push_back(sl(i, j));
  }
  return Spearman(a, b);
}

inline TTestResult CompareTrueVsPermuted(std::span<const double> true_rhos,
                                         std::span<const double> permuted_rhos) {
  return PooledTTest(true_rhos, permuted_rhos);
}

struct AlignmentResult {
  double rho_true = 0.0;
  std::vector<double> permuted_rhos;
  double relative_strength = 0.0;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
};

inline AlignmentResult ComputeAlignment(const SystemView& view,
                                        std::size_t n_perms,
                                        std::uint64_t seed,
                                        unsigned threads = 1) {
  const SimilarityMatrix sv = ViewSimilarity(view, Modality::kVisual);
  const SimilarityMatrix sl = ViewSimilarity(view, Modality::kLinguistic);
  const PermutationScorer scorer(sv, sl);
  AlignmentResult result;
  result.rho_true = scorer.RhoIdentity();
  result.permuted_rhos = PermutationDistribution(scorer, n_perms, seed, threads);
  result.relative_strength =
      RelativeAlignment(result.rho_true, result.permuted_rhos);
  result.n_permutations = n_perms;
  result.seed = seed;
  return result;
}

}  // namespace lexalign

#endif  // LEXALIGN_ALIGNMENT_HPP_
