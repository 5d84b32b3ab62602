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

#ifndef LEXALIGN_METRICS_HPP_
#define LEXALIGN_METRICS_HPP_

// Category variability and discriminability.
//
// For category i with exemplars x_i1..x_iP and centroid c_i:
//   variability(i)      = (1/P_i) sum_k dist(x_ik, c_i)
//   discriminability(i) = (1/sum_j P_j) sum_j sum_k dist(x_jk, c_i)
// The discriminability sum runs over every category j, including j = i.
// System-level values are the means over categories; with equal exemplar
// counts the system discriminability equals the (1/(N^2 P)) triple sum.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lexalign/data_model.hpp"
#include "lexalign/error.hpp"
#include "lexalign/kernels.hpp"
#include "lexalign/parallel.hpp"
#include "lexalign/stats.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

inline double Distance(const Vector& a, const Vector& b) {
  return std::sqrt(kernels::SquaredDistance(a.data(), b.data(), a.size()));
}

// Componentwise mean, summed in exemplar order.
inline Vector Centroid(std::span<const Vector> exemplars) {
  if (exemplars.empty()) Fail("centroid of an empty exemplar list");
  const std::size_t dim = exemplars.front().size();
  Vector sum(dim, 0.0);
  for (const Vector& x : exemplars) {
    if (x.size() != dim) Fail("centroid: exemplars differ in dimensionality");
    kernels::AddTo(sum.data(), x.data(), dim);
  }
  const double n = static_cast<double>(exemplars.size());
  for (double& v : sum) v /= n;
  return sum;
}

inline double CategoryVariability(std::span<const Vector> exemplars) {
  const Vector center = Centroid(exemplars);
  double sum = 0.0;
  for (const Vector& x : exemplars) sum += Distance(x, center);
  return sum / static_cast<double>(exemplars.size());
}

// Selected exemplars of one word, copied out of the view.
inline std::vector<Vector> SelectedExemplars(const SystemView& view,
                                             Modality modality,
                                             std::size_t word) {
  std::vector<Vector> out;
  const auto& all = view.base->words[word].exemplars(modality);
  for (std::size_t index : view.selected(modality, word))
    out.push_back(all[index]);
  return out;
}

inline Vector ViewCentroid(const SystemView& view, Modality modality,
                           std::size_t word) {
  const auto& selected = view.selected(modality, word);
  if (selected.empty())
    Fail("word '" + view.base->words[word].word + "' has no selected " +
         std::string(ToString(modality)) + " exemplars");
  const std::size_t dim = view.base->dim(modality);
  Vector sum(dim, 0.0);
  for (std::size_t k = 0; k < selected.size(); ++k)
    kernels::AddTo(sum.data(), view.exemplar(modality, word, k).data(), dim);
  const double n = static_cast<double>(selected.size());
  for (double& v : sum) v /= n;
  return sum;
}

struct Centroids {
  std::vector<Vector> visual;
  std::vector<Vector> linguistic;

  const std::vector<Vector>& of(Modality modality) const {
    return modality == Modality::kVisual ? visual : linguistic;
  }
};

inline Centroids ComputeCentroids(const SystemView& view) {
  Centroids centroids;
  for (std::size_t w = 0; w < view.size(); ++w) {
    centroids.visual.push_back(ViewCentroid(view, Modality::kVisual, w));
    centroids.linguistic.push_back(ViewCentroid(view, Modality::kLinguistic, w));
  }
  return centroids;
}

namespace internal {

inline double DiscriminabilityAgainst(const SystemView& view,
                                      Modality modality, const Vector& center) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < view.size(); ++j) {
    const auto& selected = view.selected(modality, j);
    for (std::size_t k = 0; k < selected.size(); ++k)
      sum += Distance(view.exemplar(modality, j, k), center);
    count += selected.size();
  }
  return sum / static_cast<double>(count);
}

}  // namespace internal

inline double CategoryDiscriminability(const SystemView& view,
                                       Modality modality,
                                       std::size_t category) {
  if (category >= view.size())
    Fail("discriminability: category index " + std::to_string(category) +
         " out of range");
  return internal::DiscriminabilityAgainst(
      view, modality, ViewCentroid(view, modality, category));
}

struct WordMetrics {
  std::string word;
  WordType type = WordType::kNoun;
  double visual_variability = 0.0;
  double visual_discriminability = 0.0;
  double linguistic_variability = 0.0;
  double linguistic_discriminability = 0.0;
};

struct MetricsReport {
  std::vector<WordMetrics> words;
  // System level: arithmetic means of the per-word columns.
  double visual_variability = 0.0;
  double visual_discriminability = 0.0;
  double linguistic_variability = 0.0;
  double linguistic_discriminability = 0.0;
};

inline MetricsReport SystemMetrics(const SystemView& view,
                                   unsigned threads = 1) {
  const std::size_t n = view.size();
  MetricsReport report;
  report.words.resize(n);
  const Centroids centroids = ComputeCentroids(view);
  ParallelFor(n, threads, [&](std::size_t i) {
    WordMetrics& row = report.words[i];
    row.word = view.base->words[i].word;
    row.type = view.base->words[i].type;
    for (Modality modality : {Modality::kVisual, Modality::kLinguistic}) {
      const Vector& center = centroids.of(modality)[i];
      const auto& selected = view.selected(modality, i);
      double spread = 0.0;
      for (std::size_t k = 0; k < selected.size(); ++k)
        spread += Distance(view.exemplar(modality, i, k), center);
      spread /= static_cast<double>(selected.size());
      const double separation =
          internal::DiscriminabilityAgainst(view, modality, center);
      if (modality == Modality::kVisual) {
        row.visual_variability = spread;
        row.visual_discriminability = separation;
      } else {
        row.linguistic_variability = spread;
        row.linguistic_discriminability = separation;
      }
    }
  });
  for (const WordMetrics& row : report.words) {
    report.visual_variability += row.visual_variability;
    report.visual_discriminability += row.visual_discriminability;
    report.linguistic_variability += row.linguistic_variability;
    report.linguistic_discriminability += row.linguistic_discriminability;
  }
  const double count = static_cast<double>(n);
  report.visual_variability /= count;
  report.visual_discriminability /= count;
  report.linguistic_variability /= count;
  report.linguistic_discriminability /= count;
  return report;
}

// Column values of one metric for words of the given type.
template <typename Getter>
std::vector<double> MetricColumn(const MetricsReport& report, WordType type,
                                 Getter getter) {
  std::vector<double> out;
  for (const WordMetrics& row : report.words)
    if (row.type == type) out.push_back(getter(row));
  return out;
}

inline std::string MetricsCsv(const MetricsReport& report) {
  std::string out =
      "word,type,visual_variability,visual_discriminability,"
      "linguistic_variability,linguistic_discriminability\n";
  for (const WordMetrics& row : report.words) {
    out += row.word + "," + std::string(ToString(row.type)) + "," +
           FormatSig17(row.visual_variability) + "," +
           FormatSig17(row.visual_discriminability) + "," +
           FormatSig17(row.linguistic_variability) + "," +
           FormatSig17(row.linguistic_discriminability) + "\n";
  }
  return out;
}

}  // namespace lexalign

#endif  // LEXALIGN_METRICS_HPP_
