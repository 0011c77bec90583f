// Copyright 2026 The discex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "discex/experiment.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace discex {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;
using testing::write_file;

const std::string kSource = DISCEX_SOURCE_DIR;
const std::string kCli = DISCEX_CLI;
const std::string kFake = DISCEX_FAKE_SIDECAR;
const std::string kSynthetic = "--config data/synthetic/experiment.toml";

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI from the source root so the shipped config resolves.
CliResult run_cli(const std::string& args, const std::string& env = "") {
  TempDir tmp;
  const std::string cmd = "cd '" + kSource + "' && env -u DISCEX_SIDECAR " +
                          env + " '" + kCli + "' " + args + " >" +
                          tmp.str("out") + " 2>" + tmp.str("err");
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(tmp.str("out"));
  r.err = read_file(tmp.str("err"));
  return r;
}

ExperimentConfig synthetic_config() {
  ExperimentConfig c;
  c.corpus = {kSource + "/data/synthetic/pdtb"};
  c.inventory = kSource + "/data/inventory/pdtb2_one_word.txt";
  return c;
}

TEST(ValidateConfigTest, AcceptsDefaultsWithCorpusAndInventory) {
  EXPECT_NO_THROW(validate_config(synthetic_config(), Command::kEvaluate));
}

TEST(ValidateConfigTest, RejectsInvalidSettings) {
  auto expect_config_error = [](ExperimentConfig c, Command cmd) {
    EXPECT_THROW(validate_config(c, cmd), ConfigError);
  };
  ExperimentConfig c = synthetic_config();
  c.corpus.clear();
  expect_config_error(c, Command::kCorpusStats);
  c = synthetic_config();
  c.inventory = "/nonexistent/inventory.txt";
  expect_config_error(c, Command::kScore);
  c = synthetic_config();
  c.inventory.clear();
  expect_config_error(c, Command::kScore);
  EXPECT_NO_THROW(validate_config(c, Command::kCorpusStats));
  c = synthetic_config();
  c.level = "3";
  expect_config_error(c, Command::kScore);
  c = synthetic_config();
  c.backend = "ngram";
  c.mode = "masked";
  c.ngram_train = kSource + "/data/synthetic/lm.txt";
  expect_config_error(c, Command::kScore);
  c.mode = "causal";
  EXPECT_NO_THROW(validate_config(c, Command::kScore));
  c.ngram_train.clear();
  expect_config_error(c, Command::kScore);
  c = synthetic_config();
  c.backend = "table";
  expect_config_error(c, Command::kScore);
  c = synthetic_config();
  c.backend = "gpt";
  expect_config_error(c, Command::kScore);
  c = synthetic_config();
  c.predictions = kSource + "/data/synthetic/lm.txt";
  expect_config_error(c, Command::kEvaluate);  // needs a single level
  c = synthetic_config();
  c.test_sections = "2";  // overlaps training
  EXPECT_THROW(validate_config(c, Command::kScore), ConfigError);
  c = synthetic_config();
  expect_config_error(c, Command::kRun);  // no --out
  c.jobs = 0;
  c.out = "x";
  expect_config_error(c, Command::kRun);
}

TEST(ConfigFingerprintTest, IgnoresOutputDirectoryAndJobs) {
  ExperimentConfig a = synthetic_config();
  ExperimentConfig b = a;
  b.out = "elsewhere";
  b.jobs = 8;
  EXPECT_EQ(config_fingerprint(a), config_fingerprint(b));
  b.classifier_k = 0.5;
  EXPECT_NE(config_fingerprint(a), config_fingerprint(b));
}

TEST(ScoresJsonlTest, RoundTrip) {
  ScoredTest s;
  LogScoreVector v;
  v.scores = {-1.0, -2.5};
  s.scores = {v, v};
  s.dists = {normalize(v), normalize(v)};
  const ScoredTest back = scores_from_jsonl(scores_to_jsonl(s), 2, 2);
  EXPECT_EQ(back.scores[1].scores, v.scores);
  EXPECT_EQ(back.dists[0].probs, s.dists[0].probs);
  EXPECT_THROW(scores_from_jsonl(scores_to_jsonl(s), 3, 2), DataError);
  EXPECT_THROW(scores_from_jsonl(scores_to_jsonl(s), 2, 3), DataError);
}

TEST(CommandTest, CorpusStatsOnSyntheticCorpus) {
  std::ostringstream out, err;
  cmd_corpus_stats(synthetic_config(), out, err);
  EXPECT_NE(out.str().find("test (implicit)"), std::string::npos);
  EXPECT_NE(out.str().find("Explicit relations outside (arg1, conn, arg2) "
                           "order: 2 of 21"),
            std::string::npos)
      << out.str();
}

TEST(CommandTest, RunWritesEveryArtifactWithFingerprint) {
  TempDir dir;
  ExperimentConfig c = synthetic_config();
  c.out = dir.str("run");
  std::ostringstream out, err;
  cmd_run(c, out, err);
  const auto manifest =
      nlohmann::json::parse(read_file(dir.str("run/manifest.json")));
  EXPECT_EQ(manifest["config_fingerprint"], config_fingerprint(c));
  for (const std::string name :
       {"corpus_stats.json", "scores.jsonl", "connective_confusion.csv",
        "model_level1.json", "predictions_level1.jsonl", "eval_level1.json",
        "agreement_level2.json", "shift_level2.txt"}) {
    EXPECT_TRUE(fs::exists(dir.path() / "run" / name)) << name;
    EXPECT_NE(std::find(manifest["artifacts"].begin(),
                        manifest["artifacts"].end(), name),
              manifest["artifacts"].end())
        << name;
  }
  const auto eval = nlohmann::json::parse(read_file(dir.str("run/eval_level1.json")));
  EXPECT_EQ(eval["config_fingerprint"], config_fingerprint(c));
  EXPECT_EQ(eval["test_size"], 12);
}

TEST(CommandTest, ShiftFixtureFlipsOneExpansionToContingency) {
  TempDir dir;
  const std::string flags = testing::write_shift_fixture(dir.path());
  const CliResult r = run_cli("shift-report " + flags + " --out " + dir.str("out"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file(dir.str("out/shift_level1.json")));
  EXPECT_EQ(j["matrix"][3][1], 1);
  EXPECT_EQ(j["changed"], 1);
  EXPECT_EQ(j["total"], 4);
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("--help").code, 0);
  EXPECT_EQ(run_cli("frobnicate").code, 1);
  EXPECT_EQ(run_cli("score " + kSynthetic + " --inventory /nonexistent").code, 1);
  EXPECT_EQ(run_cli("corpus-stats --corpus /nonexistent").code, 1);
  EXPECT_EQ(run_cli("run " + kSynthetic).code, 1);  // no --out
}

TEST(CliTest, MalformedRecordInStrictModeIsDataError) {
  TempDir dir;
  write_file(dir.path() / "21" / "wsj_2101.pipe", "Implicit|21|01\n");
  const CliResult lenient = run_cli("corpus-stats --corpus " + dir.str());
  EXPECT_EQ(lenient.code, 0);
  EXPECT_NE(lenient.err.find("warning"), std::string::npos);
  const CliResult strict = run_cli("corpus-stats --strict --corpus " + dir.str());
  EXPECT_EQ(strict.code, 2) << strict.err;
}

TEST(CliTest, EmptyCorpusDirectoryWarnsAndSucceeds) {
  TempDir dir;
  const CliResult r = run_cli("corpus-stats --corpus " + dir.str());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("test (implicit)"), std::string::npos);
}

TEST(CliTest, FlagsOverrideConfigFile) {
  TempDir dir;
  const CliResult a = run_cli("corpus-stats " + kSynthetic + " --out " + dir.str("a"));
  const CliResult b = run_cli("corpus-stats " + kSynthetic +
                              " --test-sections 21 --out " + dir.str("b"));
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const auto ja = nlohmann::json::parse(read_file(dir.str("a/corpus_stats.json")));
  const auto jb = nlohmann::json::parse(read_file(dir.str("b/corpus_stats.json")));
  EXPECT_GT(ja["splits"]["test (implicit)"]["level1"]["relations"].get<int>(),
            jb["splits"]["test (implicit)"]["level1"]["relations"].get<int>());
  const auto mb = nlohmann::json::parse(read_file(dir.str("b/manifest.json")));
  EXPECT_EQ(mb["config"]["test_sections"], "21");
  EXPECT_EQ(mb["config"]["backend"], "ngram");  // from the config file
}

TEST(CliTest, SidecarEndpointFromEnvironment) {
  TempDir dir;
  const std::string base = "score " + kSynthetic + " --backend sidecar --out ";
  // Environment beats the config file.
  write_file(dir.path() / "cfg.toml",
             read_file(kSource + "/data/synthetic/experiment.toml") +
                 "sidecar = \"exec:/nonexistent/sidecar\"\n");
  const std::string env = "DISCEX_SIDECAR='exec:" + kFake + "'";
  const CliResult a = run_cli("score --config " + dir.str("cfg.toml") +
                                  " --backend sidecar --out " + dir.str("a"),
                              env);
  EXPECT_EQ(a.code, 0) << a.err;
  // An explicit flag beats the environment.
  const CliResult b = run_cli(base + dir.str("b") + " --sidecar 'exec:" + kFake +
                                  " --error'",
                              env);
  EXPECT_EQ(b.code, 3) << b.err;
  EXPECT_NE(b.err.find("request id"), std::string::npos);
}

TEST(CliTest, ExecSidecarEndToEnd) {
  TempDir dir;
  const CliResult r = run_cli("run " + kSynthetic +
                              " --backend sidecar --mode masked --sidecar 'exec:" +
                              kFake + "' --out " + dir.str());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir.path() / "eval_level2.json"));
  const CliResult clf = run_cli(
      "evaluate " + kSynthetic + " --classifier sidecar --sidecar 'exec:" +
      kFake + "' --level 1");
  EXPECT_EQ(clf.code, 0) << clf.err;
}

TEST(CliTest, ScoresFileIsReused) {
  TempDir dir;
  ASSERT_EQ(run_cli("score " + kSynthetic + " --out " + dir.str("s")).code, 0);
  const CliResult direct =
      run_cli("evaluate " + kSynthetic + " --out " + dir.str("direct"));
  // The table backend would fail without its fixture; scores come from disk.
  const CliResult reused = run_cli("evaluate " + kSynthetic +
                                   " --backend table --scores " +
                                   dir.str("s/scores.jsonl") + " --out " +
                                   dir.str("reused"));
  ASSERT_EQ(direct.code, 0) << direct.err;
  ASSERT_EQ(reused.code, 0) << reused.err;
  auto a = nlohmann::json::parse(read_file(dir.str("direct/eval_level1.json")));
  auto b = nlohmann::json::parse(read_file(dir.str("reused/eval_level1.json")));
  EXPECT_EQ(a["reports"]["Pipeline"]["f1"], b["reports"]["Pipeline"]["f1"]);
  EXPECT_EQ(a["reports"]["+ Margin"]["per_class"],
            b["reports"]["+ Margin"]["per_class"]);
}

TEST(CliTest, PredictionsFileIsReused) {
  TempDir dir;
  ASSERT_EQ(run_cli("predict " + kSynthetic + " --level 2 --out " + dir.str("p"))
                .code,
            0);
  const CliResult r = run_cli("evaluate " + kSynthetic +
                              " --level 2 --predictions " +
                              dir.str("p/predictions_level2.jsonl") +
                              " --out " + dir.str("e"));
  ASSERT_EQ(r.code, 0) << r.err;
  const CliResult direct =
      run_cli("evaluate " + kSynthetic + " --level 2 --out " + dir.str("d"));
  auto a = nlohmann::json::parse(read_file(dir.str("e/eval_level2.json")));
  auto b = nlohmann::json::parse(read_file(dir.str("d/eval_level2.json")));
  EXPECT_EQ(a["reports"]["Pipeline"]["per_class"],
            b["reports"]["Pipeline"]["per_class"]);
}

}  // namespace
}  // namespace discex
