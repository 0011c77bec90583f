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

// discex: explicitation-based implicit discourse relation classification.
//
//   discex run --config experiment.toml --out runs/a
//   discex evaluate --config experiment.toml --backend table --table t.jsonl
//
// Every option is accepted on the command line or as a key of the config
// file (same name, without the leading dashes). Command-line values win.

#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "discex/errors.hpp"
#include "discex/experiment.hpp"

namespace {

constexpr char kSidecarEnv[] = "DISCEX_SIDECAR";

using CommandFn = std::function<void(const discex::ExperimentConfig&,
                                     std::ostream&, std::ostream&)>;

void add_options(CLI::App& app, discex::ExperimentConfig& c) {
  app.add_option("--corpus", c.corpus, "Annotation files or directories");
  app.add_option("--columns", c.columns, "Column map (default: PDTB 2.0)");
  app.add_option("--corpus-ext", c.corpus_ext, "Annotation file extension");
  app.add_option("--raw-dir", c.raw_dir, "Raw text directory for span-only layouts");
  app.add_option("--raw-ext", c.raw_ext, "Raw text file extension");
  app.add_option("--sense-map", c.sense_map, "Sense mapping table");
  app.add_option("--train-sections", c.train_sections);
  app.add_option("--dev-sections", c.dev_sections);
  app.add_option("--test-sections", c.test_sections);

  app.add_option("--test-corpus", c.test_corpus, "Separate evaluation corpus");
  app.add_option("--test-columns", c.test_columns);
  app.add_option("--test-corpus-ext", c.test_corpus_ext);
  app.add_option("--test-raw-dir", c.test_raw_dir);
  app.add_option("--test-raw-ext", c.test_raw_ext);
  app.add_option("--test-sense-map", c.test_sense_map);
  app.add_option("--test-files", c.test_files, "Restrict the test corpus to these file ids");

  app.add_option("--inventory", c.inventory, "Connective inventory");
  app.add_option("--labels-4", c.labels_4, "Level-1 label list");
  app.add_option("--labels-11", c.labels_11, "Level-2 label list");
  app.add_option("--level", c.level, "1, 2 or both");

  app.add_option("--backend", c.backend, "uniform | ngram | table | sidecar");
  app.add_option("--mode", c.mode, "causal | masked");
  app.add_option("--ngram-order", c.ngram_order);
  app.add_option("--ngram-k", c.ngram_k);
  app.add_option("--ngram-train", c.ngram_train, "Training text for the n-gram backend");
  app.add_option("--table", c.table, "Score table (JSONL) for the table backend");
  app.add_option("--sidecar", c.sidecar,
                 std::string("Sidecar endpoint (tcp://host:port or exec:cmd); "
                             "env ") + kSidecarEnv + " overrides the config file");
  app.add_flag("--length-penalty", c.length_penalty);

  app.add_option("--classifier", c.classifier, "frequency | sidecar");
  app.add_option("--classifier-k", c.classifier_k, "Add-k smoothing of the frequency classifier");
  app.add_option("--model-1", c.model_1, "Pre-trained level-1 frequency model");
  app.add_option("--model-2", c.model_2, "Pre-trained level-2 frequency model");

  app.add_option("--method", c.method, "pipeline | marginal | both");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--scores", c.scores, "Reuse scores.jsonl instead of scoring");
  app.add_option("--predictions", c.predictions, "Reuse a predictions file");
  app.add_option("--seed", c.seed);
  app.add_option("--jobs", c.jobs, "Relations scored in parallel");
  app.add_option("--runs", c.runs, "Repeated scoring runs (mean/stddev)");
  app.add_flag("--conn-probs", c.conn_probs, "Include connective probabilities in predictions");
  app.add_flag("--strict", c.strict, "Abort on the first malformed record");
  app.add_option("--top-k", c.top_k, "Gold connectives in the confusion matrix");
  app.add_option("--mcc-connective", c.mcc_connective);
  app.add_option("--mcs-label-1", c.mcs_label_1);
  app.add_option("--mcs-label-2", c.mcs_label_2);
  app.add_option("--probes", c.probes, "Constant-connective agreement probes");
}

bool flag_given(int argc, char** argv, const char* name) {
  const size_t n = std::strlen(name);
  for (int i = 1; i < argc; ++i) {
    if (std::strncmp(argv[i], name, n) == 0 &&
        (argv[i][n] == '\0' || argv[i][n] == '=')) {
      return true;
    }
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  discex::ExperimentConfig config;
  CLI::App app("Implicit discourse relation classification by explicitation",
               "discex");
  app.set_config("--config", "", "Experiment config file (TOML/INI keys)");
  add_options(app, config);
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::string, CommandFn>> commands = {
      {"corpus-stats", {"Split sizes and sense counts", discex::cmd_corpus_stats}},
      {"train-classifier", {"Train frequency classifiers", discex::cmd_train_classifier}},
      {"score", {"Score connective candidates", discex::cmd_score}},
      {"predict", {"Predict senses", discex::cmd_predict}},
      {"evaluate", {"Evaluate predictions and baselines", discex::cmd_evaluate}},
      {"agreement", {"Connective and sense agreement", discex::cmd_agreement}},
      {"confusion", {"Predicted vs gold connective counts", discex::cmd_confusion}},
      {"shift-report", {"Pipeline vs marginal label shifts", discex::cmd_shift_report}},
      {"run", {"Everything, persisted to --out", discex::cmd_run}},
  };
  for (const auto& [name, entry] : commands) {
    app.add_subcommand(name, entry.first)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? discex::kExitOk : discex::kExitConfig;
  }

  if (const char* env = std::getenv(kSidecarEnv);
      env != nullptr && *env != '\0' && !flag_given(argc, argv, "--sidecar")) {
    config.sidecar = env;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    commands.at(name).second(config, std::cout, std::cerr);
  } catch (const discex::ConfigError& e) {
    std::cerr << "discex: config error: " << e.what() << '\n';
    return discex::kExitConfig;
  } catch (const discex::DataError& e) {
    std::cerr << "discex: data error: " << e.what() << '\n';
    return discex::kExitData;
  } catch (const discex::BackendError& e) {
    std::cerr << "discex: backend error: " << e.what() << '\n';
    return discex::kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "discex: " << e.what() << '\n';
    return discex::kExitData;
  }
  return discex::kExitOk;
}
