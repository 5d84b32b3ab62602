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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "lexalign/text.hpp"
#include "test_util.hpp"

namespace lexalign {
namespace {

using testing_util::TempDir;

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult Cli(const TempDir& dir, const std::string& args) {
  const std::string log = dir / "cli.log";
  const std::string command =
      std::string(LEXALIGN_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(command.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = ReadFile(log);
  return r;
}

std::string Inputs(const TempDir& dir, const std::string& sub = "data") {
  return "--manifest " + (dir / (sub + "/manifest.json")) + " --embeddings " +
         (dir / (sub + "/embeddings.jsonl"));
}

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli_" + std::string(::testing::UnitTest::GetInstance()
                                            ->current_test_info()
                                            ->name())) {}
  void Synth(const std::string& extra = "") {
    const RunResult r = Cli(dir_, "synth --nouns 8 --verbs 6 --n-visual 4 "
                                  "--n-linguistic 4 --out " + (dir_ / "data") +
                                  " " + extra);
    ASSERT_EQ(r.code, 0) << r.output;
  }
  TempDir dir_;
};

TEST_F(CliTest, ValidateAcceptsGeneratedSystem) {
  Synth();
  RunResult r = Cli(dir_, "validate " + Inputs(dir_));
  EXPECT_EQ(r.code, 0) << r.output;
  r = Cli(dir_, "validate --json " + Inputs(dir_));
  ASSERT_EQ(r.code, 0);
  const auto report = nlohmann::json::parse(r.output);
  EXPECT_EQ(report.at("ok"), true);
  EXPECT_EQ(report.at("words"), 14);
  EXPECT_TRUE(report.at("issues").empty());
}

TEST_F(CliTest, ValidateReportsProblemsAndMissingFiles) {
  Synth();
  std::string text = ReadFile(dir_ / "data/embeddings.jsonl");
  const std::size_t first = text.find(']');
  text.replace(first, 1, ",NaN]");
  WriteFile(dir_ / "data/embeddings.jsonl", text);
  RunResult r = Cli(dir_, "validate --json " + Inputs(dir_));
  EXPECT_EQ(r.code, 1) << r.output;
  const auto report = nlohmann::json::parse(r.output);
  EXPECT_EQ(report.at("ok"), false);
  ASSERT_FALSE(report.at("issues").empty());
  EXPECT_NE(report.at("issues")[0].dump().find("line 1"), std::string::npos);
  r = Cli(dir_, "validate --manifest " + (dir_ / "nope.json") + " --embeddings " +
                    (dir_ / "nope.jsonl"));
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_NE(r.output.find("lexalign"), std::string::npos);
}

// A hand-written system in the documented on-disk format, as an external
// extractor would emit it: ten words, a few exemplars each.
TEST_F(CliTest, ValidateAcceptsHandWrittenTenWordCorpus) {
  std::filesystem::create_directories(dir_.path() / "data");
  nlohmann::ordered_json manifest = {
      {"name", "toy"}, {"dim_visual", 3}, {"dim_linguistic", 2}, {"words", nlohmann::json::array()}};
  std::string lines;
  const char* words[] = {"ball", "cat", "dog", "cup", "shoe",
                         "run", "eat", "jump", "sleep", "throw"};
  for (int w = 0; w < 10; ++w) {
    const int nv = 1 + w % 3, nl = 2;
    manifest["words"].push_back({{"word", words[w]},
                                 {"type", w < 5 ? "noun" : "verb"},
                                 {"n_visual", nv},
                                 {"n_linguistic", nl}});
    for (int k = 0; k < nv; ++k) {
      lines += "{\"word\":\"" + std::string(words[w]) +
               "\",\"modality\":\"visual\",\"index\":" + std::to_string(k) +
               ",\"vector\":[" + std::to_string(w + 1) + ".5,-0.25," +
               std::to_string(k) + "e-3]}\n";
    }
    for (int k = nl - 1; k >= 0; --k) {
      lines += "{\"word\":\"" + std::string(words[w]) +
               "\",\"modality\":\"linguistic\",\"index\":" + std::to_string(k) +
               ",\"vector\":[" + std::to_string(k + 1) + "," + std::to_string(w) +
               "]}\n";
    }
  }
  WriteFile(dir_ / "data/manifest.json", manifest.dump(2));
  WriteFile(dir_ / "data/embeddings.jsonl", lines);
  const RunResult r = Cli(dir_, "validate " + Inputs(dir_));
  EXPECT_EQ(r.code, 0) << r.output;
}

TEST_F(CliTest, MetricsWritesOneRowPerWord) {
  Synth();
  const RunResult r =
      Cli(dir_, "metrics " + Inputs(dir_) + " --out " + (dir_ / "m"));
  ASSERT_EQ(r.code, 0) << r.output;
  const std::vector<std::string> rows = SplitLines(ReadFile(dir_ / "m/metrics.csv"));
  EXPECT_EQ(rows.size(), 15u);
  EXPECT_EQ(rows[0].rfind("word,type,visual_variability", 0), 0u);
  const auto summary = nlohmann::json::parse(ReadFile(dir_ / "m/metrics_summary.json"));
  EXPECT_TRUE(summary.contains("config_hash"));
  EXPECT_EQ(summary.at("noun_vs_verb").at("visual_variability").at("df"), 12);
}

TEST_F(CliTest, AlignIsReproducibleAcrossRunsAndThreads) {
  Synth();
  const std::string base = "align " + Inputs(dir_) + " --permutations 300";
  ASSERT_EQ(Cli(dir_, base + " --seed 4 --threads 1 --out " + (dir_ / "a1")).code, 0);
  ASSERT_EQ(Cli(dir_, base + " --seed 4 --threads 1 --out " + (dir_ / "a2")).code, 0);
  ASSERT_EQ(Cli(dir_, base + " --seed 4 --threads 4 --out " + (dir_ / "a3")).code, 0);
  for (const char* file : {"alignment.json", "permuted_rhos.csv", "run_manifest.json"}) {
    const std::string a = ReadFile(dir_ / ("a1/" + std::string(file)));
    EXPECT_EQ(a, ReadFile(dir_ / ("a2/" + std::string(file)))) << file;
    if (std::string(file) != "run_manifest.json")
      EXPECT_EQ(a, ReadFile(dir_ / ("a3/" + std::string(file)))) << file;
  }
  const auto result = nlohmann::json::parse(ReadFile(dir_ / "a1/alignment.json"));
  EXPECT_EQ(result.at("n_permutations"), 300);
  EXPECT_EQ(SplitLines(ReadFile(dir_ / "a1/permuted_rhos.csv")).size(), 301u);
  ASSERT_EQ(Cli(dir_, base + " --seed 5 --out " + (dir_ / "a4")).code, 0);
  EXPECT_NE(ReadFile(dir_ / "a1/permuted_rhos.csv"),
            ReadFile(dir_ / "a4/permuted_rhos.csv"));
}

TEST_F(CliTest, VerifyDetectsTamperingAndMissingFiles) {
  Synth();
  ASSERT_EQ(Cli(dir_, "align " + Inputs(dir_) + " --permutations 50 --out " +
                          (dir_ / "a")).code, 0);
  EXPECT_EQ(Cli(dir_, "verify --out " + (dir_ / "a")).code, 0);
  std::string csv = ReadFile(dir_ / "a/permuted_rhos.csv");
  csv.back() = ' ';
  WriteFile(dir_ / "a/permuted_rhos.csv", csv);
  RunResult r = Cli(dir_, "verify --out " + (dir_ / "a"));
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("permuted_rhos.csv"), std::string::npos);
  std::filesystem::remove(dir_.path() / "a/permuted_rhos.csv");
  EXPECT_EQ(Cli(dir_, "verify --out " + (dir_ / "a")).code, 2);
}

TEST_F(CliTest, AggregateWritesGridAndCurve) {
  Synth();
  const std::string base = "aggregate " + Inputs(dir_) +
                           " --permutations 40 --sims 6 --bootstrap 50";
  ASSERT_EQ(Cli(dir_, base + " --max-visual 3 --max-linguistic 2 --out " +
                          (dir_ / "g")).code, 0);
  std::vector<std::string> rows = SplitLines(ReadFile(dir_ / "g/aggregation.csv"));
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], "mode,k_visual,k_linguistic,mean_relative_strength,ci_lo,"
                     "ci_hi,n_sims,grad_v,grad_l");
  EXPECT_EQ(rows[1].rfind("grid,1,1,", 0), 0u);
  ASSERT_EQ(Cli(dir_, base + " --mode linguistic --max-k 3 --fixed 2 --out " +
                          (dir_ / "c")).code, 0);
  rows = SplitLines(ReadFile(dir_ / "c/aggregation.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[3].rfind("linguistic,2,3,", 0), 0u);
  EXPECT_EQ(Cli(dir_, "verify --out " + (dir_ / "c")).code, 0);
  // Too few exemplars is a domain error.
  EXPECT_EQ(Cli(dir_, base + " --max-visual 5 --out " + (dir_ / "x")).code, 1);
}

TEST_F(CliTest, RegressWritesAllArtifacts) {
  Synth("--with-aoa");
  const RunResult r = Cli(dir_, "regress " + Inputs(dir_) + " --aoa " +
                                    (dir_ / "data/aoa.csv") + " --frequency " +
                                    (dir_ / "data/frequency.csv") +
                                    " --rounds 40 --depth 3 --learning-rate 0.2"
                                    " --out " + (dir_ / "r"));
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* file : {"predictions.csv", "shap.csv", "importance.csv",
                           "exclusions.log", "model.json", "regression.json"})
    EXPECT_TRUE(std::filesystem::exists(dir_.path() / "r" / file)) << file;
  EXPECT_EQ(SplitLines(ReadFile(dir_ / "r/predictions.csv")).size(), 15u);
  EXPECT_EQ(SplitLines(ReadFile(dir_ / "r/shap.csv")).size(), 1u + 14u * 7u);
  EXPECT_EQ(Cli(dir_, "verify --out " + (dir_ / "r")).code, 0);
}

TEST_F(CliTest, BadArgumentsAreUsageErrors) {
  EXPECT_EQ(Cli(dir_, "align --manifest x").code, 1);
  EXPECT_EQ(Cli(dir_, "frobnicate").code, 1);
  EXPECT_EQ(Cli(dir_, "--help").code, 0);
}

}  // namespace
}  // namespace lexalign
