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

#ifndef LEXALIGN_REGRESSION_HPP_
#define LEXALIGN_REGRESSION_HPP_

// Age-of-acquisition regression: per-word feature table, booster training
// on all rows and in-sample SHAP attributions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexalign/alignment.hpp"
#include "lexalign/data_model.hpp"
#include "lexalign/error.hpp"
#include "lexalign/gbt.hpp"
#include "lexalign/matrix.hpp"
#include "lexalign/metrics.hpp"
#include "lexalign/shap.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

inline constexpr std::array<const char*, 7> kFeatureNames = {
    "frequency",
    "type",
    "visual_variability",
    "visual_discriminability",
    "linguistic_variability",
    "linguistic_discriminability",
    "alignment",
};

namespace internal {

template <typename Parse>
std::map<std::string, double> LoadKeyedCsv(const std::string& path,
                                           const std::string& header,
                                           Parse parse) {
  const std::vector<std::string> lines = SplitLines(ReadFile(path));
  if (lines.empty() || lines.front() != header)
    Fail(path + ": expected header '" + header + "'");
  std::map<std::string, double> out;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const std::string at = path + ":" + std::to_string(ln + 1) + ": ";
    const std::vector<std::string> fields = SplitCsv(lines[ln]);
    if (fields.size() != 2 || fields[0].empty())
      Fail(at + "expected 2 fields");
    const double value = parse(fields[1], at + "word '" + fields[0] + "': ");
    if (!out.emplace(fields[0], value).second)
      Fail(at + "duplicate word '" + fields[0] + "'");
  }
  return out;
}

}  // namespace internal

// aoa.csv: header `word,aoa_months`; months must be finite and positive.
inline std::map<std::string, double> LoadAoa(const std::string& path) {
  return internal::LoadKeyedCsv(
      path, "word,aoa_months", [](const std::string& text, const std::string& at) {
        double value = 0.0;
        if (!ParseDouble(text, value) || !std::isfinite(value))
          Fail(at + "AoA '" + text + "' is not a number");
        if (!(value > 0.0)) Fail(at + "AoA must be positive");
        return value;
      });
}

// frequency.csv: header `word,count`; counts are non-negative integers.
inline std::map<std::string, double> LoadFrequency(const std::string& path) {
  return internal::LoadKeyedCsv(
      path, "word,count", [](const std::string& text, const std::string& at) {
        std::int64_t count = 0;
        std::string_view view(text);
        while (!view.empty() && view.back() == ' ') view.remove_suffix(1);
        while (!view.empty() && view.front() == ' ') view.remove_prefix(1);
        auto [ptr, ec] =
            std::from_chars(view.data(), view.data() + view.size(), count);
        if (ec != std::errc() || ptr != view.data() + view.size())
          Fail(at + "count '" + text + "' is not an integer");
        if (count < 0) Fail(at + "count must be non-negative");
        return static_cast<double>(count);
      });
}

inline std::string AoaCsv(const std::map<std::string, double>& aoa) {
  std::string out = "word,aoa_months\n";
  for (const auto& [word, months] : aoa)
    out += word + "," + FormatShortest(months) + "\n";
  return out;
}

inline std::string FrequencyCsv(const std::map<std::string, double>& freq) {
  std::string out = "word,count\n";
  for (const auto& [word, count] : freq)
    out += word + "," + std::to_string(static_cast<std::int64_t>(count)) + "\n";
  return out;
}

struct Exclusion {
  std::string word;
  std::string reason;
};

struct FeatureTable {
  std::vector<std::string> words;
  std::vector<WordType> types;
  Matrix features;  // rows follow `words`, columns follow kFeatureNames
  std::vector<double> aoa;
  std::vector<Exclusion> excluded;

  std::size_t size() const { return words.size(); }
  static std::vector<std::string> FeatureNames() {
    return {kFeatureNames.begin(), kFeatureNames.end()};
  }
};

// Per-word metrics plus the per-word alignment feature for one system.
struct WordFeatures {
  MetricsReport metrics;
  std::vector<double> alignment;  // NaN where undefined
};

inline std::vector<double> PerWordAlignment(const SystemView& view) {
  const SimilarityMatrix sv = ViewSimilarity(view, Modality::kVisual);
  const SimilarityMatrix sl = ViewSimilarity(view, Modality::kLinguistic);
  std::vector<double> out(view.size());
  for (std::size_t i = 0; i < view.size(); ++i) {
    try {
      out[i] = RowwiseAlignment(sv, sl, i);
    } catch (const Error&) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

// Computes features over the whole system, or within each word type's
// subsystem when split_by_type is set. Output rows follow manifest order.
inline WordFeatures ComputeWordFeatures(const LexicalSystem& system,
                                        bool split_by_type,
                                        unsigned threads = 1) {
  WordFeatures out;
  if (!split_by_type) {
    const SystemView view = FullView(system);
    out.metrics = SystemMetrics(view, threads);
    out.alignment = PerWordAlignment(view);
    return out;
  }
  out.metrics.words.resize(system.size());
  out.alignment.assign(system.size(), std::numeric_limits<double>::quiet_NaN());
  for (WordType type : {WordType::kNoun, WordType::kVerb}) {
    const LexicalSystem part = Subsystem(system, type);
    std::vector<std::size_t> positions;
    for (std::size_t w = 0; w < system.size(); ++w)
      if (system.words[w].type == type) positions.push_back(w);
    if (part.words.empty()) continue;
    if (part.words.size() < 4) {
      Fail("the " + std::string(ToString(type)) + " subsystem has " +
           std::to_string(part.words.size()) +
           " words; at least 4 are needed for per-word alignment");
    }
    const SystemView view = FullView(part);
    const MetricsReport metrics = SystemMetrics(view, threads);
    const std::vector<double> alignment = PerWordAlignment(view);
    for (std::size_t k = 0; k < positions.size(); ++k) {
      out.metrics.words[positions[k]] = metrics.words[k];
      out.alignment[positions[k]] = alignment[k];
    }
  }
  return out;
}

inline FeatureTable AssembleFeatures(
    const MetricsReport& metrics, std::span<const double> alignment,
    const std::map<std::string, double>& frequency,
    const std::map<std::string, double>& aoa) {
  if (alignment.size() != metrics.words.size())
    Fail("assemble: alignment and metrics differ in length");
  FeatureTable table;
  std::vector<std::array<double, kFeatureNames.size()>> rows;
  for (std::size_t i = 0; i < metrics.words.size(); ++i) {
    const WordMetrics& m = metrics.words[i];
    std::string reason;
    auto note = [&](const std::string& why) {
      reason += reason.empty() ? why : "; " + why;
    };
    const auto f = frequency.find(m.word);
    const auto a = aoa.find(m.word);
    if (a == aoa.end()) note("no AoA");
    if (f == frequency.end()) note("no frequency");
    if (!std::isfinite(alignment[i])) note("alignment undefined");
    const std::array<double, kFeatureNames.size()> row = {
        f == frequency.end() ? 0.0 : f->second,
        m.type == WordType::kVerb ? 1.0 : 0.0,
        m.visual_variability,
        m.visual_discriminability,
        m.linguistic_variability,
        m.linguistic_discriminability,
        alignment[i],
    };
    if (reason.empty()) {
      for (std::size_t c = 2; c + 1 < row.size(); ++c)
        if (!std::isfinite(row[c])) note("non-finite metric");
    }
    if (!reason.empty()) {
      table.excluded.push_back({m.word, reason});
      continue;
    }
    table.words.push_back(m.word);
    table.types.push_back(m.type);
    table.aoa.push_back(a->second);
    rows.push_back(row);
  }
  if (rows.empty()) Fail("assemble: no word has every feature and an AoA");
  table.features = Matrix(rows.size(), kFeatureNames.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), table.features.row(r));
  return table;
}

struct RegressionReport {
  gbt::BoostedModel model;
  std::vector<double> predictions;
  std::vector<gbt::ShapExplanation> explanations;
  std::vector<gbt::FeatureImportance> importance;
  double rmse = 0.0;
  double r_squared = 0.0;
};

inline constexpr std::size_t kMinRegressionRows = 10;

inline RegressionReport RunRegression(const FeatureTable& table,
                                      const gbt::BoosterParams& params) {
  if (table.size() < kMinRegressionRows) {
    Fail("regression: degenerate table with " + std::to_string(table.size()) +
         " rows; at least 10 are required");
  }
  RegressionReport report;
  report.model =
      gbt::Train(table.features, table.aoa, params, FeatureTable::FeatureNames());
  const std::size_t n = table.size();
  double ss_res = 0.0;
  double ss_tot = 0.0;
  const double mean = Mean(table.aoa);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> x(table.features.row(i), table.features.cols);
    report.explanations.push_back(gbt::TreeShap(report.model, x));
    const double prediction = report.explanations.back().prediction;
    report.predictions.push_back(prediction);
    ss_res += (prediction - table.aoa[i]) * (prediction - table.aoa[i]);
    ss_tot += (table.aoa[i] - mean) * (table.aoa[i] - mean);
  }
  report.importance = gbt::GlobalImportance(report.explanations);
  report.rmse = std::sqrt(ss_res / static_cast<double>(n));
  if (ss_res == 0.0) {
    report.r_squared = 1.0;
  } else {
    report.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  }
  return report;
}

inline std::string PredictionsCsv(const FeatureTable& table,
                                  const RegressionReport& report) {
  std::string out = "word,aoa_true,aoa_pred\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out += table.words[i] + "," + FormatSig17(table.aoa[i]) + "," +
           FormatSig17(report.predictions[i]) + "\n";
  }
  return out;
}

inline std::string ShapCsv(const FeatureTable& table,
                           const RegressionReport& report) {
  std::string out = "word,feature,feature_value,shap_value\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    const gbt::ShapExplanation& e = report.explanations[i];
    for (std::size_t j = 0; j < kFeatureNames.size(); ++j) {
      out += table.words[i] + "," + kFeatureNames[j] + "," +
             FormatSig17(e.features[j]) + "," + FormatSig17(e.phi[j]) + "\n";
    }
  }
  return out;
}

inline std::string ImportanceCsv(const RegressionReport& report) {
  std::string out = "feature,mean_abs_shap,sign\n";
  for (std::size_t j = 0; j < report.importance.size(); ++j) {
    out += std::string(kFeatureNames[j]) + "," +
           FormatSig17(report.importance[j].mean_abs_shap) + "," +
           std::to_string(report.importance[j].sign) + "\n";
  }
  return out;
}

inline std::string ExclusionsLog(const FeatureTable& table) {
  std::string out;
  for (const Exclusion& e : table.excluded) out += e.word + "\t" + e.reason + "\n";
  return out;
}

}  // namespace lexalign

#endif  // LEXALIGN_REGRESSION_HPP_
