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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lexalign/metrics.hpp"
#include "lexalign/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace lexalign {
namespace {

using testing_util::RandomSystem;

TEST(Metrics, CentroidAndVariabilityOfTwoPoints) {
  const std::vector<Vector> xs{{0.0, 0.0}, {2.0, 0.0}};
  EXPECT_EQ(Centroid(xs), (Vector{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(CategoryVariability(xs), 1.0);
  EXPECT_DOUBLE_EQ(CategoryVariability(std::vector<Vector>{{3.0, -1.0}}), 0.0);
  EXPECT_THROW(Centroid(std::vector<Vector>{}), Error);
  EXPECT_THROW(Centroid(std::vector<Vector>{{1.0}, {1.0, 2.0}}), Error);
}

TEST(Metrics, DiscriminabilityOfTwoSingletonsIsHalfTheDistance) {
  LexicalSystem s;
  s.dim_visual = 2;
  s.dim_linguistic = 1;
  s.words.push_back({"a", WordType::kNoun, {{0.0, 0.0}}, {{0.0}}});
  s.words.push_back({"b", WordType::kNoun, {{3.0, 4.0}}, {{2.0}}});
  const SystemView view = FullView(s);
  EXPECT_DOUBLE_EQ(CategoryDiscriminability(view, Modality::kVisual, 0), 2.5);
  EXPECT_DOUBLE_EQ(CategoryDiscriminability(view, Modality::kVisual, 1), 2.5);
  EXPECT_DOUBLE_EQ(CategoryDiscriminability(view, Modality::kLinguistic, 0), 1.0);
  EXPECT_THROW(CategoryDiscriminability(view, Modality::kVisual, 2), Error);
}

// Per-word metrics straight from the definitions: mean distance of a word's
// exemplars to its centroid, and mean distance of every exemplar of every
// word to that centroid.
TEST(Metrics, MatchesTripleSumOracle) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 10; ++trial) {
    const LexicalSystem s = RandomSystem(gen, 3 + gen() % 20, 1 + gen() % 40,
                                         1 + gen() % 40);
    const MetricsReport report = SystemMetrics(FullView(s), 1 + trial % 3);
    ASSERT_EQ(report.words.size(), s.size());
    double mean_vv = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (Modality m : {Modality::kVisual, Modality::kLinguistic}) {
        const auto& own = s.words[i].exemplars(m);
        const oracle::Vec c = oracle::Mean(own);
        double spread = 0.0;
        for (const Vector& x : own) spread += oracle::Dist(x, c);
        spread /= own.size();
        double sep = 0.0, count = 0.0;
        for (const WordEntry& other : s.words) {
          for (const Vector& x : other.exemplars(m)) {
            sep += oracle::Dist(x, c);
            count += 1.0;
          }
        }
        sep /= count;
        const WordMetrics& row = report.words[i];
        const bool v = m == Modality::kVisual;
        const double got_spread =
            v ? row.visual_variability : row.linguistic_variability;
        const double got_sep =
            v ? row.visual_discriminability : row.linguistic_discriminability;
        EXPECT_NEAR(got_spread, spread, 1e-12 * std::max(1.0, spread));
        EXPECT_NEAR(got_sep, sep, 1e-12 * std::max(1.0, sep));
      }
      EXPECT_EQ(report.words[i].word, s.words[i].word);
      EXPECT_EQ(report.words[i].type, s.words[i].type);
      mean_vv += report.words[i].visual_variability;
    }
    EXPECT_NEAR(report.visual_variability, mean_vv / s.size(),
                1e-12 * std::max(1.0, report.visual_variability));
  }
}

TEST(Metrics, ThreadCountDoesNotChangeResults) {
  std::mt19937_64 gen(22);
  const LexicalSystem s = RandomSystem(gen, 30, 17, 9);
  const std::string one = MetricsCsv(SystemMetrics(FullView(s), 1));
  for (unsigned threads : {2u, 3u, 8u})
    EXPECT_EQ(MetricsCsv(SystemMetrics(FullView(s), threads)), one);
}

TEST(Metrics, SubsampledViewUsesOnlySelectedExemplars) {
  std::mt19937_64 gen(23);
  const LexicalSystem s = RandomSystem(gen, 8, 5, 4, 4, 7);
  const SystemView view = Subsample(s, 2, 3, 99);
  const MetricsReport report = SystemMetrics(view);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(report.words[i].visual_variability,
                CategoryVariability(SelectedExemplars(view, Modality::kVisual, i)),
                1e-12);
    EXPECT_NEAR(report.words[i].linguistic_discriminability,
                CategoryDiscriminability(view, Modality::kLinguistic, i), 1e-12);
  }
}

TEST(Metrics, VerbSpreadFactorDoublesVariability) {
  SyntheticConfig config;
  config.n_nouns = 40;
  config.n_verbs = 40;
  config.dim_visual = 64;
  config.n_visual = 30;
  config.verb_spread_factor = 2.0;
  config.seed = 5;
  const LexicalSystem s = GenerateSystem(config);
  const MetricsReport report = SystemMetrics(FullView(s));
  auto get = [](const WordMetrics& w) { return w.visual_variability; };
  const std::vector<double> nouns = MetricColumn(report, WordType::kNoun, get);
  const std::vector<double> verbs = MetricColumn(report, WordType::kVerb, get);
  ASSERT_EQ(nouns.size(), 40u);
  EXPECT_NEAR(Mean(verbs) / Mean(nouns), 2.0, 0.05);
  const TTestResult t = PooledTTest(verbs, nouns);
  EXPECT_GT(t.t, 10.0);
  EXPECT_EQ(t.df, 78);
}

TEST(Metrics, TranslationInvariantAndScaleEquivariant) {
  std::mt19937_64 gen(25);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const LexicalSystem s = RandomSystem(gen, 4 + trial, 6, 5);
    LexicalSystem shifted = s, scaled = s;
    Vector dv(s.dim_visual), dl(s.dim_linguistic);
    for (double& v : dv) v = 10.0 * normal(gen);
    for (double& v : dl) v = 10.0 * normal(gen);
    const double c = std::exp(normal(gen));
    for (std::size_t w = 0; w < s.size(); ++w) {
      for (Vector& x : shifted.words[w].visual)
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += dv[k];
      for (Vector& x : shifted.words[w].linguistic)
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += dl[k];
      for (Modality m : {Modality::kVisual, Modality::kLinguistic})
        for (Vector& x : scaled.words[w].exemplars(m))
          for (double& v : x) v *= c;
    }
    const MetricsReport base = SystemMetrics(FullView(s));
    const MetricsReport moved = SystemMetrics(FullView(shifted));
    const MetricsReport grown = SystemMetrics(FullView(scaled));
    auto columns = [](const WordMetrics& w) {
      return std::vector<double>{w.visual_variability, w.visual_discriminability,
                                 w.linguistic_variability,
                                 w.linguistic_discriminability};
    };
    for (std::size_t w = 0; w < s.size(); ++w) {
      const auto a = columns(base.words[w]);
      const auto b = columns(moved.words[w]);
      const auto g = columns(grown.words[w]);
      for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_NEAR(b[k], a[k], 1e-9 * std::max(1.0, a[k]));
        EXPECT_NEAR(g[k], c * a[k], 1e-9 * c * a[k]);
      }
    }
  }
}

TEST(Metrics, VariabilityIsZeroExactlyWhenExemplarsCoincide) {
  const Vector x{0.1, -7.25, 3.0};
  EXPECT_EQ(CategoryVariability(std::vector<Vector>(5, x)), 0.0);
  std::vector<Vector> nearly(5, x);
  nearly[3][1] = std::nextafter(x[1], 0.0);
  EXPECT_GT(CategoryVariability(nearly), 0.0);
}

TEST(Metrics, PooledTTestIsAntisymmetric) {
  std::mt19937_64 gen(26);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(3 + gen() % 40), b(3 + gen() % 40);
    for (double& v : a) v = normal(gen);
    for (double& v : b) v = normal(gen) + 0.3;
    const TTestResult ab = PooledTTest(a, b);
    const TTestResult ba = PooledTTest(b, a);
    EXPECT_EQ(ab.t, -ba.t);
    EXPECT_EQ(ab.p, ba.p);
    EXPECT_EQ(ab.df, ba.df);
  }
}

TEST(Metrics, CsvHasOneRowPerWord) {
  std::mt19937_64 gen(24);
  const LexicalSystem s = RandomSystem(gen, 5, 3, 3);
  const std::string csv = MetricsCsv(SystemMetrics(FullView(s)));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(csv.rfind("word,type,visual_variability", 0), 0u);
  EXPECT_NE(csv.find("\nw1,verb,"), std::string::npos);
}

}  // namespace
}  // namespace lexalign
