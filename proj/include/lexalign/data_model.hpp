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

#ifndef LEXALIGN_DATA_MODEL_HPP_
#define LEXALIGN_DATA_MODEL_HPP_

// Lexical systems: N word categories, each with visual and linguistic
// exemplar embeddings, plus the manifest.json / embeddings.jsonl formats.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "rapidjson/memorystream.h"
#include "rapidjson/reader.h"
#include "lexalign/error.hpp"
#include "lexalign/rng.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

using Vector = std::vector<double>;

enum class WordType { kNoun, kVerb };
enum class Modality { kVisual, kLinguistic };

inline std::string_view ToString(WordType type) {
  return type == WordType::kNoun ? "noun" : "verb";
}

inline std::string_view ToString(Modality modality) {
  return modality == Modality::kVisual ? "visual" : "linguistic";
}

inline std::optional<WordType> ParseWordType(std::string_view text) {
  if (text == "noun") return WordType::kNoun;
  if (text == "verb") return WordType::kVerb;
  return std::nullopt;
}

inline std::optional<Modality> ParseModality(std::string_view text) {
  if (text == "visual") return Modality::kVisual;
  if (text == "linguistic") return Modality::kLinguistic;
  return std::nullopt;
}

struct WordEntry {
  std::string word;
  WordType type = WordType::kNoun;
  std::vector<Vector> visual;
  std::vector<Vector> linguistic;

  const std::vector<Vector>& exemplars(Modality modality) const {
    return modality == Modality::kVisual ? visual : linguistic;
  }
  std::vector<Vector>& exemplars(Modality modality) {
    return modality == Modality::kVisual ? visual : linguistic;
  }
};

struct LexicalSystem {
  std::string name;
  std::size_t dim_visual = 0;
  std::size_t dim_linguistic = 0;
  std::vector<WordEntry> words;

  std::size_t size() const { return words.size(); }
  std::size_t dim(Modality modality) const {
    return modality == Modality::kVisual ? dim_visual : dim_linguistic;
  }
  std::optional<std::size_t> IndexOf(std::string_view word) const {
    for (std::size_t i = 0; i < words.size(); ++i)
      if (words[i].word == word) return i;
    return std::nullopt;
  }
};

// ---------------------------------------------------------------------------
// Validation

enum class Severity { kWarning, kError };

inline std::string_view ToString(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

struct Issue {
  Severity severity = Severity::kError;
  std::string word;  // empty for system-level issues
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Issue> issues;

  void Add(Severity severity, std::string word, std::string message) {
    if (severity == Severity::kError) ok = false;
    issues.push_back({severity, std::move(word), std::move(message)});
  }
  void Merge(const ValidationReport& other) {
    for (const Issue& issue : other.issues)
      Add(issue.severity, issue.word, issue.message);
  }
  const Issue* FirstError() const {
    for (const Issue& issue : issues)
      if (issue.severity == Severity::kError) return &issue;
    return nullptr;
  }
};

inline ValidationReport Validate(const LexicalSystem& system) {
  ValidationReport report;
  if (system.words.size() < 2) {
    report.Add(Severity::kError, "",
               "system has " + std::to_string(system.words.size()) +
                   " words; at least 2 are required");
  }
  if (system.dim_visual == 0)
    report.Add(Severity::kError, "", "dim_visual must be positive");
  if (system.dim_linguistic == 0)
    report.Add(Severity::kError, "", "dim_linguistic must be positive");

  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t w = 0; w < system.words.size(); ++w) {
    const WordEntry& entry = system.words[w];
    if (entry.word.empty())
      report.Add(Severity::kError, "", "word " + std::to_string(w) +
                                           " has an empty label");
    auto [it, inserted] = seen.emplace(entry.word, w);
    if (!inserted) {
      report.Add(Severity::kError, entry.word,
                 "duplicate word (first at position " +
                     std::to_string(it->second) + ")");
    }
    for (Modality modality : {Modality::kVisual, Modality::kLinguistic}) {
      const auto& exemplars = entry.exemplars(modality);
      const std::string modality_name(ToString(modality));
      if (exemplars.empty()) {
        report.Add(Severity::kError, entry.word,
                   "has 0 " + modality_name + " exemplars");
      }
      const std::size_t dim = system.dim(modality);
      for (std::size_t e = 0; e < exemplars.size(); ++e) {
        const Vector& v = exemplars[e];
        if (v.size() != dim) {
          report.Add(Severity::kError, entry.word,
                     modality_name + " exemplar " + std::to_string(e) +
                         " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(dim));
        }
        for (std::size_t c = 0; c < v.size(); ++c) {
          if (!std::isfinite(v[c])) {
            report.Add(Severity::kError, entry.word,
                       modality_name + " exemplar " + std::to_string(e) +
                           " has non-finite component " + std::to_string(c));
            break;
          }
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Files

struct LoadResult {
  LexicalSystem system;
  ValidationReport report;  // parse-level problems, with line numbers
};

namespace internal {

inline LexicalSystem ParseManifest(const std::string& path,
                                   std::vector<std::size_t>& n_visual,
                                   std::vector<std::size_t>& n_linguistic) {
  const std::string text = ReadFile(path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(path + ": invalid JSON: " + e.what());
  }
  auto require = [&](const nlohmann::json& object, const char* key,
                     const std::string& where) -> const nlohmann::json& {
    if (!object.is_object() || !object.contains(key))
      Fail(path + ": " + where + " is missing \"" + key + "\"");
    return object.at(key);
  };
  auto positive = [&](const nlohmann::json& value, const std::string& what) {
    if (!value.is_number_integer() || value.get<std::int64_t>() <= 0)
      Fail(path + ": " + what + " must be a positive integer");
    return static_cast<std::size_t>(value.get<std::int64_t>());
  };

  LexicalSystem system;
  const auto& name = require(manifest, "name", "manifest");
  if (!name.is_string()) Fail(path + ": \"name\" must be a string");
  system.name = name.get<std::string>();
  system.dim_visual =
      positive(require(manifest, "dim_visual", "manifest"), "dim_visual");
  system.dim_linguistic = positive(
      require(manifest, "dim_linguistic", "manifest"), "dim_linguistic");
  const auto& words = require(manifest, "words", "manifest");
  if (!words.is_array()) Fail(path + ": \"words\" must be an array");

  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& record = words[i];
    const std::string where = "words[" + std::to_string(i) + "]";
    const auto& word = require(record, "word", where);
    if (!word.is_string()) Fail(path + ": " + where + ".word must be a string");
    const auto& type = require(record, "type", where);
    std::optional<WordType> parsed_type;
    if (type.is_string()) parsed_type = ParseWordType(type.get<std::string>());
    if (!parsed_type) {
      Fail(path + ": word '" + word.get<std::string>() +
           "': type must be \"noun\" or \"verb\"");
    }
    WordEntry entry;
    entry.word = word.get<std::string>();
    entry.type = *parsed_type;
    n_visual.push_back(positive(require(record, "n_visual", where),
                                "word '" + entry.word + "': n_visual"));
    n_linguistic.push_back(positive(require(record, "n_linguistic", where),
                                    "word '" + entry.word + "': n_linguistic"));
    system.words.push_back(std::move(entry));
  }
  return system;
}

// One embeddings.jsonl record, read without building a JSON tree.
struct EmbeddingRecord {
  std::optional<std::string> word;
  std::optional<std::string> modality;
  std::optional<std::int64_t> index;
  bool has_vector = false;
  std::vector<double> values;
  std::optional<std::size_t> first_non_number;
};

// Replaces the number token around `offset` with +-Infinity. Used for lines
// RapidJSON rejects only because a literal overflows a double (1e999).
inline bool InfinityAt(std::string& line, std::size_t offset) {
  constexpr std::string_view kNumberChars = "0123456789+-.eE";
  if (offset > line.size()) return false;
  std::size_t begin = offset, end = offset;
  while (begin > 0 && kNumberChars.find(line[begin - 1]) != std::string_view::npos) --begin;
  while (end < line.size() && kNumberChars.find(line[end]) != std::string_view::npos) ++end;
  if (begin == end) return false;
  line.replace(begin, end - begin, line[begin] == '-' ? "-Infinity" : "Infinity");
  return true;
}

// RapidJSON SAX handler filling an EmbeddingRecord. RapidJSON checks the JSON
// grammar; number tokens are converted here with correctly rounded from_chars.
class RecordReader {
 public:
  explicit RecordReader(EmbeddingRecord& record) : r_(&record) {}

  bool Null() { return Scalar(); }
  bool Bool(bool) { return Scalar(); }
  // Numbers arrive as raw text (kParseNumbersAsStringsFlag) so that -0 and
  // out-of-range literals are converted by from_chars, not by the reader.
  bool Int(int) { return false; }
  bool Uint(unsigned) { return false; }
  bool Int64(std::int64_t) { return false; }
  bool Uint64(std::uint64_t) { return false; }
  bool Double(double) { return false; }
  bool RawNumber(const char* text, rapidjson::SizeType length, bool) {
    const char* end = text + length;
    if (InVector()) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(text, end, v);
      if (ec == std::errc::result_out_of_range) {
        // Overflow is reported as non-finite; underflow keeps its signed zero
        // or subnormal the way strtod would.
        v = std::strtod(std::string(text, length).c_str(), nullptr);
      } else if (ec != std::errc() || ptr != end) {
        return Scalar();
      }
      return Number(v);
    }
    if (AtTop() && key_ == "index") {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(text, end, v);
      if (ec == std::errc() && ptr == end) r_->index = v;
    }
    return true;
  }
  bool String(const char* text, rapidjson::SizeType length, bool) {
    if (AtTop() && key_ == "word") r_->word = std::string(text, length);
    if (AtTop() && key_ == "modality") r_->modality = std::string(text, length);
    return Scalar();
  }
  bool StartObject() { return Open(false); }
  bool EndObject(rapidjson::SizeType) { return Close(); }
  bool StartArray() { return Open(true); }
  bool EndArray(rapidjson::SizeType) { return Close(); }
  bool Key(const char* text, rapidjson::SizeType length, bool) {
    if (depth_ == 1) {
      key_.assign(text, length);
      // A repeated key replaces the earlier value, as in a parsed object.
      if (key_ == "word") r_->word.reset();
      if (key_ == "modality") r_->modality.reset();
      if (key_ == "index") r_->index.reset();
      if (key_ == "vector") {
        r_->has_vector = false;
        r_->values.clear();
        r_->first_non_number.reset();
      }
    }
    return true;
  }

  bool top_is_object() const { return top_is_object_; }

 private:
  bool AtTop() const { return depth_ == 1; }
  bool InVector() const { return depth_ == 2 && vector_open_; }
  bool Number(double v) {
    r_->values.push_back(v);
    return true;
  }
  // Non-number content inside the vector marks its component.
  bool Scalar() {
    if (InVector()) NonNumber();
    return true;
  }
  void NonNumber() {
    if (!r_->first_non_number) r_->first_non_number = r_->values.size();
    r_->values.push_back(0.0);
  }
  bool Open(bool array) {
    if (depth_ == 0) {
      top_is_object_ = !array;
    } else if (InVector()) {
      NonNumber();
    } else if (AtTop() && key_ == "vector" && array) {
      r_->has_vector = true;
      vector_open_ = true;
    }
    ++depth_;
    return true;
  }
  bool Close() {
    --depth_;
    if (depth_ == 1) vector_open_ = false;
    return true;
  }

  EmbeddingRecord* r_;
  std::size_t depth_ = 0;
  std::string key_;
  bool vector_open_ = false;
  bool top_is_object_ = false;
};

}  // namespace internal

// Loads a system, recording record-level problems as issues instead of
// throwing. Unreadable files and a malformed manifest still throw.
inline LoadResult LoadSystemLenient(const std::string& manifest_path,
                                    const std::string& embeddings_path) {
  LoadResult result;
  std::vector<std::size_t> n_visual, n_linguistic;
  result.system = internal::ParseManifest(manifest_path, n_visual, n_linguistic);
  LexicalSystem& system = result.system;
  ValidationReport& report = result.report;

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t w = 0; w < system.words.size(); ++w) {
    if (!index.emplace(system.words[w].word, w).second) {
      report.Add(Severity::kError, system.words[w].word,
                 "duplicate word in manifest");
    }
  }

  // slots[w][m][i] holds exemplar i of modality m for word w.
  std::vector<std::array<std::vector<std::optional<Vector>>, 2>> slots(
      system.words.size());
  for (std::size_t w = 0; w < system.words.size(); ++w) {
    slots[w][0].resize(n_visual[w]);
    slots[w][1].resize(n_linguistic[w]);
  }

  const std::string text = ReadFile(embeddings_path);
  internal::EmbeddingRecord record;
  std::size_t ln = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++ln;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const std::string at = "line " + std::to_string(ln);
    record = internal::EmbeddingRecord{};
    internal::RecordReader reader(record);
    rapidjson::MemoryStream stream(line.data(), line.size());
    rapidjson::Reader parser;
    rapidjson::ParseResult parsed =
        parser.Parse<rapidjson::kParseNumbersAsStringsFlag>(stream, reader);
    if (parsed.Code() == rapidjson::kParseErrorNumberTooBig) {
      std::string patched(line);
      while (parsed.Code() == rapidjson::kParseErrorNumberTooBig &&
             internal::InfinityAt(patched, parsed.Offset())) {
        record = internal::EmbeddingRecord{};
        reader = internal::RecordReader(record);
        rapidjson::MemoryStream retry(patched.data(), patched.size());
        parsed = parser.Parse<rapidjson::kParseNumbersAsStringsFlag |
                              rapidjson::kParseNanAndInfFlag>(retry, reader);
      }
    }
    if (parsed.IsError()) {
      report.Add(Severity::kError, "", at + ": invalid JSON");
      continue;
    }
    if (!reader.top_is_object() || !record.word) {
      report.Add(Severity::kError, "", at + ": missing string \"word\"");
      continue;
    }
    const std::string& word = *record.word;
    auto found = index.find(word);
    if (found == index.end()) {
      report.Add(Severity::kError, word, at + ": word is not in the manifest");
      continue;
    }
    const std::size_t w = found->second;
    std::optional<Modality> modality;
    if (record.modality) modality = ParseModality(*record.modality);
    if (!modality) {
      report.Add(Severity::kError, word,
                 at + ": modality must be \"visual\" or \"linguistic\"");
      continue;
    }
    const std::string modality_name(ToString(*modality));
    auto& bucket = slots[w][*modality == Modality::kVisual ? 0 : 1];
    if (!record.index) {
      report.Add(Severity::kError, word, at + ": missing integer \"index\"");
      continue;
    }
    const std::int64_t idx = *record.index;
    if (idx < 0 || static_cast<std::size_t>(idx) >= bucket.size()) {
      report.Add(Severity::kError, word,
                 at + ": " + modality_name + " index " + std::to_string(idx) +
                     " outside 0.." + std::to_string(bucket.size()) +
                     " declared in the manifest");
      continue;
    }
    if (bucket[idx]) {
      report.Add(Severity::kError, word,
                 at + ": duplicate " + modality_name + " index " +
                     std::to_string(idx));
      continue;
    }
    if (!record.has_vector) {
      report.Add(Severity::kError, word, at + ": missing array \"vector\"");
      continue;
    }
    const std::size_t dim = system.dim(*modality);
    if (record.values.size() != dim) {
      report.Add(Severity::kError, word,
                 at + ": " + modality_name + " vector has length " +
                     std::to_string(record.values.size()) + ", expected " +
                     std::to_string(dim));
      continue;
    }
    if (record.first_non_number) {
      report.Add(Severity::kError, word,
                 at + ": component " + std::to_string(*record.first_non_number) +
                     " is not a number");
      continue;
    }
    bool good = true;
    for (std::size_t c = 0; c < dim; ++c) {
      if (!std::isfinite(record.values[c])) {
        report.Add(Severity::kError, word,
                   at + ": component " + std::to_string(c) + " is not finite");
        good = false;
        break;
      }
    }
    if (good) bucket[idx] = std::move(record.values);
  }

  for (std::size_t w = 0; w < system.words.size(); ++w) {
    WordEntry& entry = system.words[w];
    for (Modality modality : {Modality::kVisual, Modality::kLinguistic}) {
      auto& bucket = slots[w][modality == Modality::kVisual ? 0 : 1];
      for (std::size_t i = 0; i < bucket.size(); ++i) {
        if (bucket[i]) {
          entry.exemplars(modality).push_back(std::move(*bucket[i]));
        } else {
          report.Add(Severity::kError, entry.word,
                     std::string("missing ") + std::string(ToString(modality)) +
                         " exemplar index " + std::to_string(i));
        }
      }
    }
  }
  return result;
}

// Loads and validates; throws on the first problem.
inline LexicalSystem LoadSystem(const std::string& manifest_path,
                                const std::string& embeddings_path) {
  LoadResult result = LoadSystemLenient(manifest_path, embeddings_path);
  result.report.Merge(Validate(result.system));
  if (const Issue* issue = result.report.FirstError()) {
    Fail(issue->word.empty() ? issue->message
                             : "word '" + issue->word + "': " + issue->message);
  }
  return std::move(result.system);
}

inline std::string ManifestJson(const LexicalSystem& system) {
  nlohmann::ordered_json manifest;
  manifest["name"] = system.name;
  manifest["dim_visual"] = system.dim_visual;
  manifest["dim_linguistic"] = system.dim_linguistic;
  manifest["words"] = nlohmann::ordered_json::array();
  for (const WordEntry& entry : system.words) {
    nlohmann::ordered_json record;
    record["word"] = entry.word;
    record["type"] = std::string(ToString(entry.type));
    record["n_visual"] = entry.visual.size();
    record["n_linguistic"] = entry.linguistic.size();
    manifest["words"].push_back(std::move(record));
  }
  return manifest.dump(2) + "\n";
}

// One record per line, words in manifest order, visual before linguistic.
inline std::string EmbeddingsJsonl(const LexicalSystem& system) {
  std::string out;
  for (const WordEntry& entry : system.words) {
    const std::string word = nlohmann::json(entry.word).dump();
    for (Modality modality : {Modality::kVisual, Modality::kLinguistic}) {
      const auto& exemplars = entry.exemplars(modality);
      for (std::size_t i = 0; i < exemplars.size(); ++i) {
        out += "{\"word\":" + word + ",\"modality\":\"";
        out += ToString(modality);
        out += "\",\"index\":" + std::to_string(i) + ",\"vector\":[";
        for (std::size_t c = 0; c < exemplars[i].size(); ++c) {
          if (c) out += ',';
          out += FormatShortest(exemplars[i][c]);
        }
        out += "]}\n";
      }
    }
  }
  return out;
}

inline void SaveSystem(const LexicalSystem& system,
                       const std::string& manifest_path,
                       const std::string& embeddings_path) {
  WriteFile(manifest_path, ManifestJson(system));
  WriteFile(embeddings_path, EmbeddingsJsonl(system));
}

// The words of one type, in manifest order.
inline LexicalSystem Subsystem(const LexicalSystem& system, WordType type) {
  LexicalSystem part;
  part.name = system.name + "/" + std::string(ToString(type));
  part.dim_visual = system.dim_visual;
  part.dim_linguistic = system.dim_linguistic;
  for (const WordEntry& entry : system.words)
    if (entry.type == type) part.words.push_back(entry);
  return part;
}

// ---------------------------------------------------------------------------
// Views

// A selection of exemplar indices per word and modality over a base system.
struct SystemView {
  const LexicalSystem* base = nullptr;
  std::vector<std::vector<std::size_t>> visual;
  std::vector<std::vector<std::size_t>> linguistic;

  std::size_t size() const { return base->size(); }
  const std::vector<std::size_t>& selected(Modality modality,
                                           std::size_t word) const {
    return modality == Modality::kVisual ? visual[word] : linguistic[word];
  }
  const Vector& exemplar(Modality modality, std::size_t word,
                         std::size_t k) const {
    return base->words[word].exemplars(modality)[selected(modality, word)[k]];
  }
};

inline SystemView FullView(const LexicalSystem& system) {
  SystemView view;
  view.base = &system;
  for (const WordEntry& entry : system.words) {
    std::vector<std::size_t> v(entry.visual.size()), l(entry.linguistic.size());
    std::iota(v.begin(), v.end(), std::size_t{0});
    std::iota(l.begin(), l.end(), std::size_t{0});
    view.visual.push_back(std::move(v));
    view.linguistic.push_back(std::move(l));
  }
  return view;
}

// The full random visiting order of one word's exemplars under `seed`.
// Subsample takes prefixes of it, so larger k extends smaller k.
inline std::vector<std::size_t> SelectionOrder(const LexicalSystem& system,
                                               std::size_t word,
                                               Modality modality,
                                               std::uint64_t seed) {
  std::vector<std::size_t> order(
      system.words[word].exemplars(modality).size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(DeriveSeed(seed, word, modality == Modality::kVisual ? 0 : 1));
  Shuffle(std::span<std::size_t>(order), rng);
  return order;
}

inline SystemView Subsample(const LexicalSystem& system, std::size_t k_visual,
                            std::size_t k_linguistic, std::uint64_t seed) {
  if (k_visual == 0 || k_linguistic == 0)
    Fail("subsample: exemplar counts must be at least 1");
  SystemView view;
  view.base = &system;
  view.visual.resize(system.size());
  view.linguistic.resize(system.size());
  for (std::size_t w = 0; w < system.size(); ++w) {
    const WordEntry& entry = system.words[w];
    if (entry.visual.size() < k_visual) {
      Fail("subsample: word '" + entry.word + "' has " +
           std::to_string(entry.visual.size()) + " visual exemplars, " +
           std::to_string(k_visual) + " requested");
    }
    if (entry.linguistic.size() < k_linguistic) {
      Fail("subsample: word '" + entry.word + "' has " +
           std::to_string(entry.linguistic.size()) +
           " linguistic exemplars, " + std::to_string(k_linguistic) +
           " requested");
    }
    auto v = SelectionOrder(system, w, Modality::kVisual, seed);
    auto l = SelectionOrder(system, w, Modality::kLinguistic, seed);
    v.resize(k_visual);
    l.resize(k_linguistic);
    view.visual[w] = std::move(v);
    view.linguistic[w] = std::move(l);
  }
  return view;
}

// Minimum exemplar count over words for one modality.
inline std::size_t MinExemplars(const LexicalSystem& system,
                                Modality modality) {
  std::size_t least = SIZE_MAX;
  for (const WordEntry& entry : system.words)
    least = std::min(least, entry.exemplars(modality).size());
  return system.words.empty() ? 0 : least;
}

}  // namespace lexalign

#endif  // LEXALIGN_DATA_MODEL_HPP_
