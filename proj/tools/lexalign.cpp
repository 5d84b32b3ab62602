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


// lexalign command-line tool. Every analysis subcommand writes its artifacts
// plus run_manifest.json (config, config hash, artifact SHA-256s) into --out.
// Exit codes: 0 success, 1 domain failure, 2 I/O failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lexalign/lexalign.hpp"
#include "sha256.hpp"

namespace {

using json = nlohmann::json;
using namespace lexalign;
using tools::Sha256Hex;

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kSampledStream = 0x5A3713D5ULL;
constexpr std::uint64_t kSynthAoaStream = 0xA0A0A0A0ULL;

struct CommonOptions {
  std::string manifest;
  std::string embeddings;
  std::uint64_t seed = 1;
  std::size_t permutations = 1000;
  std::size_t sims = 0;  // 0: subcommand default
  std::string out = ".";
  unsigned threads = 0;  // 0: hardware concurrency
  bool json = false;
  std::string word_type = "all";
};

void AddInputs(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--manifest", o.manifest, "manifest.json path")->required();
  cmd->add_option("--embeddings", o.embeddings, "embeddings.jsonl path")
      ->required();
}

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  AddInputs(cmd, o);
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker cap (0 = all cores)")
      ->capture_default_str();
  cmd->add_flag("--json", o.json, "print the summary as JSON");
  cmd->add_option("--word-type", o.word_type,
                  "restrict to one word type before analysis")
      ->check(CLI::IsMember({"all", "noun", "verb"}))
      ->capture_default_str();
}

// Collects artifacts of one run and writes run_manifest.json last.
class Run {
 public:
  Run(std::string subcommand, const std::string& out, json config)
      : subcommand_(std::move(subcommand)), out_(out) {
    config["subcommand"] = subcommand_;
    config_ = std::move(config);
    config_hash_ = Sha256Hex(config_.dump());
    std::error_code ec;
    std::filesystem::create_directories(out_, ec);
    if (ec) FailIo("cannot create output directory '" + out + "': " + ec.message());
  }

  const std::string& config_hash() const { return config_hash_; }

  void Write(const std::string& name, const std::string& content) {
    WriteFile((out_ / name).string(), content);
    artifacts_[name] = Sha256Hex(content);
  }

  // JSON artifacts carry the hash of the config that produced them.
  void WriteJson(const std::string& name, json content) {
    content["config_hash"] = config_hash_;
    Write(name, content.dump(2) + "\n");
  }

  void Finish(const std::map<std::string, std::string>& input_paths) {
    json manifest;
    manifest["tool"] = "lexalign";
    manifest["version"] = kVersion;
    manifest["subcommand"] = subcommand_;
    manifest["config"] = config_;
    manifest["config_hash"] = config_hash_;
    manifest["input_paths"] = input_paths;
    manifest["artifacts"] = artifacts_;
    WriteFile((out_ / "run_manifest.json").string(), manifest.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  std::filesystem::path out_;
  json config_;
  std::string config_hash_;
  std::map<std::string, std::string> artifacts_;
};

json InputConfig(const CommonOptions& o) {
  json inputs;
  inputs["manifest_sha256"] = Sha256Hex(ReadFile(o.manifest));
  inputs["embeddings_sha256"] = Sha256Hex(ReadFile(o.embeddings));
  json config;
  config["inputs"] = inputs;
  config["seed"] = o.seed;
  config["word_type"] = o.word_type;
  return config;
}

std::map<std::string, std::string> InputPaths(const CommonOptions& o) {
  return {{"manifest", o.manifest}, {"embeddings", o.embeddings}};
}

LexicalSystem LoadSelected(const CommonOptions& o) {
  LexicalSystem system = LoadSystem(o.manifest, o.embeddings);
  if (o.word_type == "all") return system;
  LexicalSystem part = Subsystem(system, *ParseWordType(o.word_type));
  if (part.size() < 2) {
    Fail("only " + std::to_string(part.size()) + " " + o.word_type +
         " words in the system; at least 2 are required");
  }
  return part;
}

void Summarize(const CommonOptions& o, const json& summary,
               const std::string& line) {
  if (o.json) {
    std::cout << summary.dump() << "\n";
  } else {
    std::cout << line << "\n";
  }
}

std::string Fixed(double value, int digits = 6) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

json NullableNumber(double value) {
  return std::isfinite(value) ? json(value) : json(nullptr);
}

// validate ------------------------------------------------------------------

int CmdValidate(const CommonOptions& o) {
  const LoadResult loaded = LoadSystemLenient(o.manifest, o.embeddings);
  ValidationReport report = loaded.report;
  report.Merge(Validate(loaded.system));
  if (o.json) {
    json out;
    out["ok"] = report.ok;
    out["words"] = loaded.system.size();
    out["issues"] = json::array();
    for (const Issue& issue : report.issues) {
      out["issues"].push_back({{"severity", ToString(issue.severity)},
                               {"word", issue.word},
                               {"message", issue.message}});
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (const Issue& issue : report.issues) {
      std::cout << ToString(issue.severity) << "\t"
                << (issue.word.empty() ? "-" : issue.word) << "\t"
                << issue.message << "\n";
    }
    std::cout << (report.ok ? "ok" : "invalid") << ": "
              << loaded.system.size() << " words, " << report.issues.size()
              << " issues\n";
  }
  return report.ok ? 0 : 1;
}

// metrics -------------------------------------------------------------------

json CompareTypes(const MetricsReport& report) {
  json out = json::object();
  struct Column {
    const char* name;
    double WordMetrics::*field;
  };
  const Column columns[] = {
      {"visual_variability", &WordMetrics::visual_variability},
      {"visual_discriminability", &WordMetrics::visual_discriminability},
      {"linguistic_variability", &WordMetrics::linguistic_variability},
      {"linguistic_discriminability", &WordMetrics::linguistic_discriminability},
  };
  for (const Column& c : columns) {
    auto get = [&](const WordMetrics& m) { return m.*(c.field); };
    const std::vector<double> nouns = MetricColumn(report, WordType::kNoun, get);
    const std::vector<double> verbs = MetricColumn(report, WordType::kVerb, get);
    if (nouns.size() < 2 || verbs.size() < 2) return nullptr;
    json entry;
    entry["n_noun"] = nouns.size();
    entry["n_verb"] = verbs.size();
    entry["mean_noun"] = Mean(nouns);
    entry["mean_verb"] = Mean(verbs);
    try {
      const TTestResult t = PooledTTest(nouns, verbs);
      entry["t"] = t.t;
      entry["df"] = t.df;
      entry["p"] = t.p;
    } catch (const Error&) {
      entry["t"] = nullptr;
      entry["df"] = nouns.size() + verbs.size() - 2;
      entry["p"] = nullptr;
    }
    out[c.name] = entry;
  }
  return out;
}

int CmdMetrics(const CommonOptions& o, bool by_type) {
  json config = InputConfig(o);
  config["by_type"] = by_type;
  Run run("metrics", o.out, config);
  const LexicalSystem system = LoadSelected(o);

  MetricsReport report;
  if (by_type) {
    report.words.resize(system.size());
    for (WordType type : {WordType::kNoun, WordType::kVerb}) {
      const LexicalSystem part = Subsystem(system, type);
      if (part.size() == 0) continue;
      if (part.size() < 2) {
        Fail("the " + std::string(ToString(type)) +
             " subsystem has 1 word; at least 2 are required");
      }
      const MetricsReport sub = SystemMetrics(FullView(part), o.threads);
      std::size_t k = 0;
      for (std::size_t w = 0; w < system.size(); ++w)
        if (system.words[w].type == type) report.words[w] = sub.words[k++];
    }
    auto mean_of = [&](double WordMetrics::*field) {
      double sum = 0.0;
      for (const WordMetrics& m : report.words) sum += m.*field;
      return sum / static_cast<double>(report.words.size());
    };
    report.visual_variability = mean_of(&WordMetrics::visual_variability);
    report.visual_discriminability =
        mean_of(&WordMetrics::visual_discriminability);
    report.linguistic_variability = mean_of(&WordMetrics::linguistic_variability);
    report.linguistic_discriminability =
        mean_of(&WordMetrics::linguistic_discriminability);
  } else {
    report = SystemMetrics(FullView(system), o.threads);
  }

  run.Write("metrics.csv", MetricsCsv(report));
  json summary;
  summary["words"] = system.size();
  summary["system"] = {
      {"visual_variability", report.visual_variability},
      {"visual_discriminability", report.visual_discriminability},
      {"linguistic_variability", report.linguistic_variability},
      {"linguistic_discriminability", report.linguistic_discriminability}};
  summary["noun_vs_verb"] = CompareTypes(report);
  run.WriteJson("metrics_summary.json", summary);
  run.Finish(InputPaths(o));

  std::string line = "words=" + std::to_string(system.size()) +
                     " visual_variability=" + Fixed(report.visual_variability) +
                     " linguistic_variability=" +
                     Fixed(report.linguistic_variability);
  if (!summary["noun_vs_verb"].is_null()) {
    const json& vv = summary["noun_vs_verb"]["visual_variability"];
    if (!vv["t"].is_null()) {
      line += " visual_variability_t(" + vv["df"].dump() + ")=" +
              Fixed(vv["t"].get<double>(), 3);
    }
  }
  Summarize(o, summary, line);
  return 0;
}

// align ---------------------------------------------------------------------

struct SampledOptions {
  std::size_t systems = 0;
  std::size_t k_visual = 1;
  std::size_t k_linguistic = 1;
};

int CmdAlign(const CommonOptions& o, const SampledOptions& sampled) {
  json config = InputConfig(o);
  config["permutations"] = o.permutations;
  if (sampled.systems > 0) {
    config["sampled"] = {{"systems", sampled.systems},
                         {"k_visual", sampled.k_visual},
                         {"k_linguistic", sampled.k_linguistic}};
  }
  Run run("align", o.out, config);
  const LexicalSystem system = LoadSelected(o);

  const AlignmentResult result =
      ComputeAlignment(FullView(system), o.permutations, o.seed, o.threads);
  std::string rhos = "permutation,rho\n";
  for (std::size_t p = 0; p < result.permuted_rhos.size(); ++p)
    rhos += std::to_string(p) + "," + FormatSig17(result.permuted_rhos[p]) + "\n";
  run.Write("permuted_rhos.csv", rhos);

  json out;
  out["rho_true"] = result.rho_true;
  out["relative_strength"] = result.relative_strength;
  out["n_permutations"] = result.n_permutations;
  out["seed"] = result.seed;
  out["permuted_rhos_path"] = "permuted_rhos.csv";
  out["words"] = system.size();

  // Many small systems drawn by subsampling exemplars: true strengths
  // against the pooled permuted strengths.
  if (sampled.systems > 0) {
    const std::size_t n = sampled.systems;
    std::vector<double> true_rhos(n), relative(n);
    std::vector<std::vector<double>> permuted(n);
    ParallelFor(n, o.threads, [&](std::size_t s) {
      const std::uint64_t seed = DeriveSeed(o.seed, kSampledStream, s);
      const SystemView view =
          Subsample(system, sampled.k_visual, sampled.k_linguistic, seed);
      AlignmentResult r = ComputeAlignment(view, o.permutations, seed, 1);
      true_rhos[s] = r.rho_true;
      relative[s] = r.relative_strength;
      permuted[s] = std::move(r.permuted_rhos);
    });
    std::vector<double> pooled;
    pooled.reserve(n * o.permutations);
    for (const auto& p : permuted) pooled.insert(pooled.end(), p.begin(), p.end());
    std::string csv = "system,rho_true,relative_strength\n";
    for (std::size_t s = 0; s < n; ++s) {
      csv += std::to_string(s) + "," + FormatSig17(true_rhos[s]) + "," +
             FormatSig17(relative[s]) + "\n";
    }
    run.Write("sampled_systems.csv", csv);
    json block;
    block["systems"] = n;
    block["k_visual"] = sampled.k_visual;
    block["k_linguistic"] = sampled.k_linguistic;
    block["mean_rho_true"] = Mean(true_rhos);
    block["mean_relative_strength"] = Mean(relative);
    block["mean_rho_permuted"] = Mean(pooled);
    if (n >= 2) {
      const TTestResult t = CompareTrueVsPermuted(true_rhos, pooled);
      block["t"] = t.t;
      block["df"] = t.df;
      block["p"] = t.p;
    }
    block["path"] = "sampled_systems.csv";
    out["sampled"] = block;
  }
  run.WriteJson("alignment.json", out);
  run.Finish(InputPaths(o));

  std::string line = "rho_true=" + Fixed(result.rho_true) +
                     " relative_strength=" + Fixed(result.relative_strength) +
                     " n_permutations=" + std::to_string(result.n_permutations);
  if (out.contains("sampled") && out["sampled"].contains("t")) {
    line += " sampled_t(" + out["sampled"]["df"].dump() + ")=" +
            Fixed(out["sampled"]["t"].get<double>(), 3);
  }
  Summarize(o, out, line);
  return 0;
}

// aggregate -----------------------------------------------------------------

struct AggregateOptions {
  std::string mode = "grid";
  std::size_t max_k = 8;
  std::size_t fixed = 20;
  std::size_t max_visual = 8;
  std::size_t max_linguistic = 8;
  std::size_t bootstrap = 1000;
  double confidence = 0.95;
  bool independent_cells = false;
};

int CmdAggregate(const CommonOptions& o, const AggregateOptions& a) {
  const bool grid = a.mode == "grid";
  AggregationOptions options;
  options.n_sims = o.sims > 0 ? o.sims : (grid ? 500 : 1000);
  options.n_perms = o.permutations;
  options.bootstrap_resamples = a.bootstrap;
  options.confidence = a.confidence;
  options.threads = o.threads;
  options.independent_cells = a.independent_cells;

  json config = InputConfig(o);
  config["mode"] = a.mode;
  config["permutations"] = options.n_perms;
  config["sims"] = options.n_sims;
  config["bootstrap"] = options.bootstrap_resamples;
  config["confidence"] = options.confidence;
  if (grid) {
    config["max_visual"] = a.max_visual;
    config["max_linguistic"] = a.max_linguistic;
    config["independent_cells"] = a.independent_cells;
  } else {
    config["max_k"] = a.max_k;
    config["fixed"] = a.fixed;
  }
  Run run("aggregate", o.out, config);
  const LexicalSystem system = LoadSelected(o);

  json summary;
  summary["mode"] = a.mode;
  summary["sims"] = options.n_sims;
  std::string line;
  if (grid) {
    AggregationGrid result =
        AggregateGrid(system, a.max_visual, a.max_linguistic, options, o.seed);
    if (a.max_visual >= 2 && a.max_linguistic >= 2)
      result = GradientField(std::move(result));
    run.Write("aggregation.csv", AggregationCsv(result));
    const double low = result.at(1, 1).mean_relative_strength;
    const double high =
        result.at(a.max_visual, a.max_linguistic).mean_relative_strength;
    summary["corner_low"] = low;
    summary["corner_high"] = high;
    line = "grid " + std::to_string(a.max_visual) + "x" +
           std::to_string(a.max_linguistic) + " corner(1,1)=" + Fixed(low) +
           " corner(" + std::to_string(a.max_visual) + "," +
           std::to_string(a.max_linguistic) + ")=" + Fixed(high);
  } else {
    const Modality mode = *ParseModality(a.mode);
    const AggregationCurve curve =
        AggregateCurve(system, mode, a.max_k, a.fixed, options, o.seed);
    run.Write("aggregation.csv", AggregationCsv(curve));
    std::vector<double> means;
    for (const CurveLevel& level : curve.levels)
      means.push_back(level.mean_relative_strength);
    summary["mean_relative_strength"] = means;
    line = a.mode + " curve k=1.." + std::to_string(a.max_k) +
           " relative_strength " + Fixed(means.front()) + " -> " +
           Fixed(means.back());
  }
  run.Finish(InputPaths(o));
  Summarize(o, summary, line);
  return 0;
}

// regress -------------------------------------------------------------------

struct RegressOptions {
  std::string aoa;
  std::string frequency;
  gbt::BoosterParams params;
  bool joint = false;
};

int CmdRegress(const CommonOptions& o, const RegressOptions& r) {
  r.params.Check();
  json config = InputConfig(o);
  config["inputs"]["aoa_sha256"] = Sha256Hex(ReadFile(r.aoa));
  config["inputs"]["frequency_sha256"] = Sha256Hex(ReadFile(r.frequency));
  config["rounds"] = r.params.n_rounds;
  config["depth"] = r.params.max_depth;
  config["learning_rate"] = r.params.learning_rate;
  config["lambda"] = r.params.lambda;
  config["gamma"] = r.params.gamma;
  config["min_child_weight"] = r.params.min_child_weight;
  config["joint"] = r.joint;
  Run run("regress", o.out, config);

  const LexicalSystem system = LoadSelected(o);
  const auto aoa = LoadAoa(r.aoa);
  const auto frequency = LoadFrequency(r.frequency);
  const WordFeatures features = ComputeWordFeatures(system, !r.joint, o.threads);
  const FeatureTable table =
      AssembleFeatures(features.metrics, features.alignment, frequency, aoa);
  const RegressionReport report = RunRegression(table, r.params);

  run.Write("predictions.csv", PredictionsCsv(table, report));
  run.Write("shap.csv", ShapCsv(table, report));
  run.Write("importance.csv", ImportanceCsv(report));
  run.Write("exclusions.log", ExclusionsLog(table));
  run.WriteJson("model.json", gbt::ModelToJson(report.model));

  json summary;
  summary["rows"] = table.size();
  summary["excluded"] = table.excluded.size();
  summary["rmse"] = report.rmse;
  summary["r_squared"] = NullableNumber(report.r_squared);
  std::size_t top = 0;
  for (std::size_t j = 1; j < report.importance.size(); ++j) {
    if (report.importance[j].mean_abs_shap >
        report.importance[top].mean_abs_shap) {
      top = j;
    }
  }
  summary["top_feature"] = kFeatureNames[top];
  run.WriteJson("regression.json", summary);
  run.Finish({{"manifest", o.manifest},
              {"embeddings", o.embeddings},
              {"aoa", r.aoa},
              {"frequency", r.frequency}});

  Summarize(o, summary,
            "rows=" + std::to_string(table.size()) + " excluded=" +
                std::to_string(table.excluded.size()) + " rmse=" +
                Fixed(report.rmse) + " top_feature=" + kFeatureNames[top]);
  return 0;
}

// verify --------------------------------------------------------------------

int CmdVerify(const std::string& dir, bool as_json) {
  const std::filesystem::path root(dir);
  json manifest;
  try {
    manifest = json::parse(ReadFile((root / "run_manifest.json").string()));
  } catch (const json::exception& e) {
    Fail(std::string("run_manifest.json is not valid JSON: ") + e.what());
  }
  std::vector<std::string> problems;
  const std::string declared = manifest.value("config_hash", "");
  if (!manifest.contains("config") ||
      Sha256Hex(manifest["config"].dump()) != declared) {
    problems.push_back("run_manifest.json: config hash does not match config");
  }
  std::size_t checked = 0;
  const json artifacts = manifest.value("artifacts", json::object());
  for (const auto& [name, hash] : artifacts.items()) {
    const std::string content = ReadFile((root / name).string());
    ++checked;
    if (Sha256Hex(content) != hash.get<std::string>())
      problems.push_back(name + ": content hash mismatch");
    if (name.size() > 5 && name.ends_with(".json")) {
      const json artifact = json::parse(content, nullptr, false);
      if (artifact.is_discarded() || artifact.value("config_hash", "") != declared)
        problems.push_back(name + ": declared config hash mismatch");
    }
  }
  if (as_json) {
    std::cout << json{{"ok", problems.empty()},
                      {"artifacts", checked},
                      {"problems", problems}}
                     .dump()
              << "\n";
  } else {
    for (const std::string& p : problems) std::cout << "mismatch\t" << p << "\n";
    std::cout << (problems.empty() ? "ok" : "failed") << ": " << checked
              << " artifacts checked\n";
  }
  return problems.empty() ? 0 : 1;
}

// synth ---------------------------------------------------------------------

struct SynthOptions {
  SyntheticConfig config;
  bool with_aoa = false;
};

int CmdSynth(const SynthOptions& s, const std::string& out, bool as_json) {
  const SyntheticConfig& c = s.config;
  json config;
  config["name"] = c.name;
  config["nouns"] = c.n_nouns;
  config["verbs"] = c.n_verbs;
  config["dim_visual"] = c.dim_visual;
  config["dim_linguistic"] = c.dim_linguistic;
  config["latent_dim"] = c.latent_dim;
  config["n_visual"] = c.n_visual;
  config["n_linguistic"] = c.n_linguistic;
  config["visual_spread"] = c.visual_spread;
  config["linguistic_spread"] = c.linguistic_spread;
  config["verb_spread_factor"] = c.verb_spread_factor;
  config["shared"] = c.shared;
  config["seed"] = c.seed;
  config["with_aoa"] = s.with_aoa;
  Run run("synth", out, config);

  const LexicalSystem system = GenerateSystem(c);
  run.Write("manifest.json", ManifestJson(system));
  run.Write("embeddings.jsonl", EmbeddingsJsonl(system));
  if (s.with_aoa) {
    // AoA driven by visual variability (z-scored) plus noise; frequency is
    // an unrelated random count.
    const MetricsReport metrics = SystemMetrics(FullView(system));
    std::vector<double> vv;
    for (const WordMetrics& m : metrics.words) vv.push_back(m.visual_variability);
    const double mean = Mean(vv);
    double var = 0.0;
    for (double v : vv) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(vv.size()));
    SplitMix64 rng(DeriveSeed(c.seed, kSynthAoaStream));
    std::map<std::string, double> aoa, frequency;
    for (std::size_t w = 0; w < system.size(); ++w) {
      const double z = sd > 0.0 ? (vv[w] - mean) / sd : 0.0;
      aoa[system.words[w].word] = std::max(6.0, 30.0 + 8.0 * z + rng.Normal());
      frequency[system.words[w].word] = static_cast<double>(1 + rng.Below(10000));
    }
    run.Write("aoa.csv", AoaCsv(aoa));
    run.Write("frequency.csv", FrequencyCsv(frequency));
  }
  run.Finish({});
  const json summary = {{"words", system.size()}, {"out", out}};
  if (as_json) {
    std::cout << summary.dump() << "\n";
  } else {
    std::cout << "wrote " << system.size() << " words to " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexalign: category structure and cross-modal alignment of "
               "word embeddings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonOptions common;
  int status = 0;
  std::string stage;

  CLI::App* validate = app.add_subcommand("validate", "check input files");
  AddInputs(validate, common);
  validate->add_flag("--json", common.json, "machine-readable report");

  bool by_type = false;
  CLI::App* metrics = app.add_subcommand("metrics", "variability and discriminability");
  AddCommon(metrics, common);
  metrics->add_flag("--by-type", by_type,
                    "treat nouns and verbs as separate systems");

  SampledOptions sampled;
  CLI::App* align = app.add_subcommand("align", "alignment strength");
  AddCommon(align, common);
  align->add_option("--permutations", common.permutations, "permuted mappings")
      ->capture_default_str();
  align->add_option("--systems", sampled.systems,
                    "also score this many exemplar-subsampled systems");
  align->add_option("--k-visual", sampled.k_visual,
                    "visual exemplars per word in sampled systems")
      ->capture_default_str();
  align->add_option("--k-linguistic", sampled.k_linguistic,
                    "linguistic exemplars per word in sampled systems")
      ->capture_default_str();

  AggregateOptions agg;
  CLI::App* aggregate = app.add_subcommand("aggregate", "exemplar aggregation");
  AddCommon(aggregate, common);
  aggregate->add_option("--mode", agg.mode, "visual, linguistic or grid")
      ->check(CLI::IsMember({"visual", "linguistic", "grid"}))
      ->capture_default_str();
  aggregate->add_option("--permutations", common.permutations,
                        "permuted mappings per simulation")
      ->capture_default_str();
  aggregate->add_option("--sims", common.sims,
                        "simulations per level (default 1000, grid 500)");
  aggregate->add_option("--max-k", agg.max_k, "largest exemplar count (curve)")
      ->capture_default_str();
  aggregate->add_option("--fixed", agg.fixed,
                        "exemplars of the other modality (curve)")
      ->capture_default_str();
  aggregate->add_option("--max-visual", agg.max_visual, "grid rows")
      ->capture_default_str();
  aggregate->add_option("--max-linguistic", agg.max_linguistic, "grid columns")
      ->capture_default_str();
  aggregate->add_flag("--independent-cells", agg.independent_cells,
                      "grid: separate exemplar draws per cell instead of "
                      "nested trajectories");
  aggregate->add_option("--bootstrap", agg.bootstrap, "bootstrap resamples")
      ->capture_default_str();
  aggregate->add_option("--confidence", agg.confidence, "interval level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  RegressOptions reg;
  CLI::App* regress = app.add_subcommand("regress", "AoA regression with SHAP");
  AddCommon(regress, common);
  regress->add_option("--aoa", reg.aoa, "aoa.csv path")->required();
  regress->add_option("--frequency", reg.frequency, "frequency.csv path")
      ->required();
  regress->add_option("--rounds", reg.params.n_rounds, "boosting rounds")
      ->capture_default_str();
  regress->add_option("--depth", reg.params.max_depth, "maximum tree depth")
      ->capture_default_str();
  regress->add_option("--learning-rate", reg.params.learning_rate, "shrinkage")
      ->capture_default_str();
  regress->add_option("--lambda", reg.params.lambda, "L2 leaf penalty")
      ->capture_default_str();
  regress->add_option("--gamma", reg.params.gamma, "split penalty")
      ->capture_default_str();
  regress->add_option("--min-child-weight", reg.params.min_child_weight,
                      "minimum hessian per child")
      ->capture_default_str();
  regress->add_flag("--joint", reg.joint,
                    "compute features over the whole system instead of per "
                    "word type");

  std::string verify_dir;
  CLI::App* verify = app.add_subcommand("verify", "re-check artifact hashes");
  verify->add_option("--out,dir", verify_dir, "run directory")->required();
  verify->add_flag("--json", common.json, "machine-readable report");

  SynthOptions synth;
  std::string synth_out = ".";
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic system");
  SyntheticConfig& sc = synth.config;
  synth_cmd->add_option("--name", sc.name)->capture_default_str();
  synth_cmd->add_option("--nouns", sc.n_nouns)->capture_default_str();
  synth_cmd->add_option("--verbs", sc.n_verbs)->capture_default_str();
  synth_cmd->add_option("--dim-visual", sc.dim_visual)->capture_default_str();
  synth_cmd->add_option("--dim-linguistic", sc.dim_linguistic)
      ->capture_default_str();
  synth_cmd->add_option("--latent-dim", sc.latent_dim)->capture_default_str();
  synth_cmd->add_option("--n-visual", sc.n_visual, "visual exemplars per word")
      ->capture_default_str();
  synth_cmd->add_option("--n-linguistic", sc.n_linguistic,
                        "linguistic exemplars per word")
      ->capture_default_str();
  synth_cmd->add_option("--visual-spread", sc.visual_spread)
      ->capture_default_str();
  synth_cmd->add_option("--linguistic-spread", sc.linguistic_spread)
      ->capture_default_str();
  synth_cmd->add_option("--verb-spread-factor", sc.verb_spread_factor)
      ->capture_default_str();
  synth_cmd->add_option("--shared", sc.shared,
                        "1 = modalities share word latents, 0 = independent")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth_cmd->add_option("--seed", sc.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth_out)->capture_default_str();
  synth_cmd->add_flag("--with-aoa", synth.with_aoa,
                      "also write aoa.csv and frequency.csv");
  synth_cmd->add_flag("--json", common.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*validate) {
      stage = "validate";
      status = CmdValidate(common);
    } else if (*metrics) {
      stage = "metrics";
      status = CmdMetrics(common, by_type);
    } else if (*align) {
      stage = "align";
      status = CmdAlign(common, sampled);
    } else if (*aggregate) {
      stage = "aggregate";
      status = CmdAggregate(common, agg);
    } else if (*regress) {
      stage = "regress";
      status = CmdRegress(common, reg);
    } else if (*verify) {
      stage = "verify";
      status = CmdVerify(verify_dir, common.json);
    } else if (*synth_cmd) {
      stage = "synth";
      status = CmdSynth(synth, synth_out, common.json);
    }
  } catch (const Error& e) {
    std::cerr << "lexalign " << stage << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::kIo ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "lexalign " << stage << ": " << e.what() << "\n";
    return 1;
  }
  return status;
}
