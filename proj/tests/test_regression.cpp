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
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lexalign/regression.hpp"
#include "lexalign/synthetic.hpp"
#include "test_util.hpp"

namespace lexalign {
namespace {

using testing_util::PlantedAoaTable;
using testing_util::TempDir;

gbt::BoosterParams QuickParams() {
  gbt::BoosterParams params;
  params.n_rounds = 150;
  params.max_depth = 3;
  params.learning_rate = 0.1;
  return params;
}

TEST(Loaders, ReadAoaAndFrequency) {
  TempDir dir("loaders");
  WriteFile(dir / "aoa.csv", "word,aoa_months\ndog,16.2\nrun,30\n");
  WriteFile(dir / "freq.csv", "word,count\ngo,5012\ndog, 7 \n");
  const auto aoa = LoadAoa(dir / "aoa.csv");
  EXPECT_EQ(aoa.at("dog"), 16.2);
  EXPECT_EQ(aoa.at("run"), 30.0);
  const auto freq = LoadFrequency(dir / "freq.csv");
  EXPECT_EQ(freq.at("go"), 5012.0);
  EXPECT_EQ(freq.at("dog"), 7.0);
}

TEST(Loaders, RejectBadRowsWithLocation) {
  TempDir dir("loader_errors");
  auto message = [&](const std::string& header, const std::string& body,
                     bool aoa) -> std::string {
    WriteFile(dir / "t.csv", header + "\n" + body);
    try {
      aoa ? LoadAoa(dir / "t.csv") : LoadFrequency(dir / "t.csv");
    } catch (const Error& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message("word,aoa_months", "a,1\na,2\n", true).find(":3: duplicate word 'a'"),
            std::string::npos);
  EXPECT_NE(message("word,aoa_months", "a,x\n", true).find("is not a number"),
            std::string::npos);
  EXPECT_NE(message("word,aoa_months", "a,-3\n", true).find("positive"),
            std::string::npos);
  EXPECT_NE(message("word,count", "a,-3\n", false).find("non-negative"),
            std::string::npos);
  EXPECT_NE(message("word,count", "a,2.5\n", false).find("not an integer"),
            std::string::npos);
  EXPECT_NE(message("word,count", "a,1,2\n", false).find("expected 2 fields"),
            std::string::npos);
  EXPECT_NE(message("word,freq", "a,1\n", false).find("expected header"),
            std::string::npos);
  EXPECT_THROW(LoadAoa(dir / "missing.csv"), Error);
}

TEST(Loaders, RoundTripHundredRows) {
  TempDir dir("loader_round_trip");
  std::mt19937_64 gen(71);
  std::uniform_real_distribution<double> months(8.0, 200.0);
  std::map<std::string, double> aoa, freq;
  for (int i = 0; i < 100; ++i) {
    aoa["word" + std::to_string(i)] = months(gen);
    freq["word" + std::to_string(i)] = static_cast<double>(gen() % 1000000);
  }
  WriteFile(dir / "aoa.csv", AoaCsv(aoa));
  WriteFile(dir / "freq.csv", FrequencyCsv(freq));
  EXPECT_EQ(LoadAoa(dir / "aoa.csv"), aoa);
  EXPECT_EQ(LoadFrequency(dir / "freq.csv"), freq);
}

MetricsReport ToyMetrics(std::size_t n) {
  MetricsReport m;
  for (std::size_t i = 0; i < n; ++i) {
    WordMetrics w;
    w.word = "w" + std::to_string(i);
    w.type = i % 2 ? WordType::kVerb : WordType::kNoun;
    w.visual_variability = 1.0 + i;
    w.visual_discriminability = 2.0 + i;
    w.linguistic_variability = 3.0 + i;
    w.linguistic_discriminability = 4.0 + i;
    m.words.push_back(w);
  }
  return m;
}

TEST(Assemble, JoinsInManifestOrderAndLogsExclusions) {
  const MetricsReport metrics = ToyMetrics(6);
  std::vector<double> alignment{0.1, 0.2, NAN, 0.4, 0.5, 0.6};
  const std::map<std::string, double> freq{
      {"w0", 10}, {"w1", 11}, {"w2", 12}, {"w3", 13}, {"w5", 15}};
  const std::map<std::string, double> aoa{
      {"w5", 50}, {"w0", 20}, {"w2", 22}, {"w4", 24}, {"w3", 23}, {"zzz", 1}};
  const FeatureTable t = AssembleFeatures(metrics, alignment, freq, aoa);
  EXPECT_EQ(t.words, (std::vector<std::string>{"w0", "w3", "w5"}));
  EXPECT_EQ(t.aoa, (std::vector<double>{20, 23, 50}));
  ASSERT_EQ(t.excluded.size(), 3u);
  EXPECT_EQ(t.excluded[0].word, "w1");
  EXPECT_EQ(t.excluded[0].reason, "no AoA");
  EXPECT_EQ(t.excluded[1].word, "w2");
  EXPECT_EQ(t.excluded[1].reason, "alignment undefined");
  EXPECT_EQ(t.excluded[2].word, "w4");
  EXPECT_EQ(t.excluded[2].reason, "no frequency");
  EXPECT_EQ(t.features.cols, kFeatureNames.size());
  const std::vector<double> row(t.features.row(1), t.features.row(1) + 7);
  EXPECT_EQ(row, (std::vector<double>{13, 1, 4, 5, 6, 7, 0.4}));
  EXPECT_EQ(ExclusionsLog(t), "w1\tno AoA\nw2\talignment undefined\nw4\tno frequency\n");
  EXPECT_THROW(AssembleFeatures(metrics, alignment, freq, {}), Error);
}

TEST(Features, SplitByTypeComputesWithinEachSubsystem) {
  SyntheticConfig config;
  config.n_nouns = 6;
  config.n_verbs = 5;
  config.n_visual = 3;
  config.n_linguistic = 3;
  const LexicalSystem s = GenerateSystem(config);
  const WordFeatures joint = ComputeWordFeatures(s, false);
  const WordFeatures split = ComputeWordFeatures(s, true);
  ASSERT_EQ(split.metrics.words.size(), s.size());
  const LexicalSystem verbs = Subsystem(s, WordType::kVerb);
  const MetricsReport verb_metrics = SystemMetrics(FullView(verbs));
  const std::vector<double> verb_alignment = PerWordAlignment(FullView(verbs));
  for (std::size_t k = 0; k < verbs.size(); ++k) {
    EXPECT_EQ(split.metrics.words[6 + k].word, verbs.words[k].word);
    EXPECT_EQ(split.metrics.words[6 + k].visual_discriminability,
              verb_metrics.words[k].visual_discriminability);
    EXPECT_EQ(split.alignment[6 + k], verb_alignment[k]);
  }
  // Variability depends only on the word's own exemplars.
  for (std::size_t i = 0; i < s.size(); ++i)
    EXPECT_EQ(split.metrics.words[i].visual_variability,
              joint.metrics.words[i].visual_variability);
  config.n_verbs = 3;
  EXPECT_THROW(ComputeWordFeatures(GenerateSystem(config), true), Error);
}

TEST(Regression, PlantedVisualVariabilityRanksFirst) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const FeatureTable table = PlantedAoaTable(seed, 210, 0.1);
    const RegressionReport r = RunRegression(table, QuickParams());
    std::size_t top = 0;
    for (std::size_t j = 1; j < r.importance.size(); ++j)
      if (r.importance[j].mean_abs_shap > r.importance[top].mean_abs_shap) top = j;
    EXPECT_STREQ(kFeatureNames[top], "visual_variability") << "seed " << seed;
    EXPECT_EQ(r.importance[2].sign, 1);
    EXPECT_GT(r.r_squared, 0.8);
    for (const gbt::ShapExplanation& e : r.explanations) {
      double total = e.base;
      for (double p : e.phi) total += p;
      EXPECT_LT(std::fabs(total - e.prediction), 1e-8);
    }
  }
}

TEST(Regression, NegativeFrequencyEffectGetsNegativeSign) {
  FeatureTable table = PlantedAoaTable(9, 150, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i)
    table.aoa[i] = 40.0 - 3.0 * std::log(1.0 + table.features(i, 0));
  const RegressionReport r = RunRegression(table, QuickParams());
  EXPECT_EQ(r.importance[0].sign, -1);
  for (std::size_t j = 1; j < r.importance.size(); ++j)
    EXPECT_GT(r.importance[0].mean_abs_shap, r.importance[j].mean_abs_shap);
}

TEST(Regression, ConstantAoaGivesZeroAttributions) {
  FeatureTable table = PlantedAoaTable(3, 40, 0.1);
  std::fill(table.aoa.begin(), table.aoa.end(), 24.0);
  const RegressionReport r = RunRegression(table, QuickParams());
  for (double p : r.predictions) EXPECT_EQ(p, 24.0);
  for (const gbt::FeatureImportance& f : r.importance) {
    EXPECT_EQ(f.mean_abs_shap, 0.0);
    EXPECT_EQ(f.sign, 0);
  }
  EXPECT_EQ(r.rmse, 0.0);
}

TEST(Regression, RejectsDegenerateTables) {
  const FeatureTable table = PlantedAoaTable(4, 9, 0.1);
  EXPECT_THROW(RunRegression(table, QuickParams()), Error);
}

TEST(Regression, CsvOutputs) {
  const FeatureTable table = PlantedAoaTable(5, 12, 0.1);
  gbt::BoosterParams params = QuickParams();
  params.n_rounds = 5;
  const RegressionReport r = RunRegression(table, params);
  const std::string shap = ShapCsv(table, r);
  EXPECT_EQ(std::count(shap.begin(), shap.end(), '\n'), 1 + 12 * 7);
  EXPECT_EQ(PredictionsCsv(table, r).rfind("word,aoa_true,aoa_pred\nw0,", 0), 0u);
  const std::string importance = ImportanceCsv(r);
  EXPECT_NE(importance.find("\nvisual_variability,"), std::string::npos);
}

}  // namespace
}  // namespace lexalign
