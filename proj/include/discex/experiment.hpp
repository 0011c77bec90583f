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

// Experiment wiring behind the `discex` command-line tool: configuration,
// validation, and one function per subcommand.

#ifndef DISCEX_EXPERIMENT_HPP_
#define DISCEX_EXPERIMENT_HPP_

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "discex/biodrb.hpp"
#include "discex/candidates.hpp"
#include "discex/classifier.hpp"
#include "discex/columns.hpp"
#include "discex/corpus.hpp"
#include "discex/distribution.hpp"
#include "discex/errors.hpp"
#include "discex/evaluation.hpp"
#include "discex/inference.hpp"
#include "discex/ngram.hpp"
#include "discex/report.hpp"
#include "discex/scoring.hpp"
#include "discex/sense.hpp"
#include "discex/sidecar.hpp"
#include "discex/text.hpp"

namespace discex {

// Flat experiment configuration. Every field has a command-line flag and a
// config-file key of the same name (dashes instead of underscores).
struct ExperimentConfig {
  // Annotation corpus used for training and, unless test_corpus is given,
  // for evaluation.
  std::vector<std::string> corpus;
  std::string columns;  // empty: built-in PDTB 2.0 layout
  std::string corpus_ext = ".pipe";
  std::string raw_dir;
  std::string raw_ext;
  std::string sense_map;
  std::string train_sections = "2-20,23,24";
  std::string dev_sections = "0-1";
  std::string test_sections = "21-22";

  // Separate evaluation corpus (e.g. BioDRB). All its implicit relations,
  // optionally restricted to test_files, form the test set.
  std::vector<std::string> test_corpus;
  std::string test_columns;
  std::string test_corpus_ext = ".pipe";
  std::string test_raw_dir;
  std::string test_raw_ext;
  std::string test_sense_map;
  std::vector<std::string> test_files;

  std::string inventory;
  std::string labels_4;   // empty: built-in four top-level senses
  std::string labels_11;  // empty: built-in 11 second-level types
  std::string level = "both";  // 1 | 2 | both

  std::string backend = "uniform";  // uniform | ngram | table | sidecar
  std::string mode = "causal";      // causal | masked
  int ngram_order = 3;
  double ngram_k = 1.0;
  std::string ngram_train;
  std::string table;
  std::string sidecar;
  bool length_penalty = false;

  std::string classifier = "frequency";  // frequency | sidecar
  double classifier_k = 1.0;
  std::string model_1;  // pre-trained frequency models
  std::string model_2;

  std::string method = "both";  // pipeline | marginal | both
  std::string out;
  std::string scores;       // scores.jsonl from a previous `score`
  std::string predictions;  // predictions JSONL from a previous `predict`

  unsigned seed = 0;
  int jobs = 1;
  int runs = 1;
  bool conn_probs = false;
  bool strict = false;
  size_t top_k = 10;
  std::string mcc_connective = "but";
  std::string mcs_label_1 = "Expansion";
  std::string mcs_label_2 = "Contingency.Cause";
  std::vector<std::string> probes = {"and", "but"};
};

// Settings that cannot change results are left out so that the fingerprint
// identifies outputs, not invocations.
inline ojson config_to_json(const ExperimentConfig& c) {
  ojson j;
  j["corpus"] = c.corpus;
  j["columns"] = c.columns;
  j["corpus_ext"] = c.corpus_ext;
  j["raw_dir"] = c.raw_dir;
  j["raw_ext"] = c.raw_ext;
  j["sense_map"] = c.sense_map;
  j["train_sections"] = c.train_sections;
  j["dev_sections"] = c.dev_sections;
  j["test_sections"] = c.test_sections;
  j["test_corpus"] = c.test_corpus;
  j["test_columns"] = c.test_columns;
  j["test_corpus_ext"] = c.test_corpus_ext;
  j["test_raw_dir"] = c.test_raw_dir;
  j["test_raw_ext"] = c.test_raw_ext;
  j["test_sense_map"] = c.test_sense_map;
  j["test_files"] = c.test_files;
  j["inventory"] = c.inventory;
  j["labels_4"] = c.labels_4;
  j["labels_11"] = c.labels_11;
  j["level"] = c.level;
  j["backend"] = c.backend;
  j["mode"] = c.mode;
  j["ngram_order"] = c.ngram_order;
  j["ngram_k"] = c.ngram_k;
  j["ngram_train"] = c.ngram_train;
  j["table"] = c.table;
  j["sidecar"] = c.sidecar;
  j["length_penalty"] = c.length_penalty;
  j["classifier"] = c.classifier;
  j["classifier_k"] = c.classifier_k;
  j["model_1"] = c.model_1;
  j["model_2"] = c.model_2;
  j["method"] = c.method;
  j["scores"] = c.scores;
  j["predictions"] = c.predictions;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  j["conn_probs"] = c.conn_probs;
  j["strict"] = c.strict;
  j["top_k"] = c.top_k;
  j["mcc_connective"] = c.mcc_connective;
  j["mcs_label_1"] = c.mcs_label_1;
  j["mcs_label_2"] = c.mcs_label_2;
  j["probes"] = c.probes;
  return j;
}

inline std::string config_fingerprint(const ExperimentConfig& c) {
  Fingerprint fp;
  fp.update(config_to_json(c).dump());
  return fp.hex();
}

enum class Command {
  kCorpusStats,
  kTrainClassifier,
  kScore,
  kPredict,
  kEvaluate,
  kAgreement,
  kConfusion,
  kShiftReport,
  kRun,
};

inline bool command_scores(Command c) {
  return c != Command::kCorpusStats && c != Command::kTrainClassifier;
}

inline std::vector<int> config_levels(const ExperimentConfig& c) {
  if (c.level == "1") return {1};
  if (c.level == "2") return {2};
  return {1, 2};
}

inline std::vector<InferenceMethod> config_methods(const ExperimentConfig& c) {
  if (c.method == "pipeline") return {InferenceMethod::kPipeline};
  if (c.method == "marginal") return {InferenceMethod::kMarginal};
  return {InferenceMethod::kPipeline, InferenceMethod::kMarginal};
}

// Checks flags and path existence. Reads no corpus data.
inline void validate_config(const ExperimentConfig& c, Command cmd) {
  namespace fs = std::filesystem;
  auto require_path = [](const std::string& path, const std::string& what) {
    if (!path.empty() && !fs::exists(path)) {
      throw ConfigError(what + " not found: " + path);
    }
  };
  auto require_set = [](const std::string& value, const std::string& what) {
    if (value.empty()) throw ConfigError("missing required setting: " + what);
  };

  if (c.level != "1" && c.level != "2" && c.level != "both") {
    throw ConfigError("level must be 1, 2 or both");
  }
  if (c.method != "pipeline" && c.method != "marginal" && c.method != "both") {
    throw ConfigError("method must be pipeline, marginal or both");
  }
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.runs < 1) throw ConfigError("runs must be >= 1");
  if (c.top_k < 1) throw ConfigError("top-k must be >= 1");
  if (c.classifier != "frequency" && c.classifier != "sidecar") {
    throw ConfigError("classifier must be frequency or sidecar");
  }
  if (c.classifier == "frequency" && !(c.classifier_k >= 0.0)) {
    throw ConfigError("classifier-k must be >= 0");
  }
  if (c.classifier == "sidecar") require_set(c.sidecar, "sidecar");

  if (c.corpus.empty()) throw ConfigError("missing required setting: corpus");
  for (const auto& p : c.corpus) require_path(p, "corpus path");
  for (const auto& p : c.test_corpus) require_path(p, "test corpus path");
  require_path(c.columns, "columns file");
  require_path(c.test_columns, "test columns file");
  require_path(c.sense_map, "sense map");
  require_path(c.test_sense_map, "test sense map");
  require_path(c.raw_dir, "raw text directory");
  require_path(c.test_raw_dir, "test raw text directory");
  require_path(c.labels_4, "4-way label file");
  require_path(c.labels_11, "11-way label file");
  require_path(c.model_1, "level-1 model");
  require_path(c.model_2, "level-2 model");

  SplitSpec spec;
  spec.train = parse_section_set(c.train_sections);
  spec.dev = parse_section_set(c.dev_sections);
  spec.test = parse_section_set(c.test_sections);
  spec.validate();

  if (cmd == Command::kRun) require_set(c.out, "out");
  if (cmd == Command::kTrainClassifier) require_set(c.out, "out");

  if (command_scores(cmd)) {
    require_set(c.inventory, "inventory");
    require_path(c.inventory, "inventory");
    const ScoringMode mode = parse_mode(c.mode);
    require_path(c.scores, "scores file");
    require_path(c.predictions, "predictions file");
    if (!c.predictions.empty() && c.level == "both") {
      throw ConfigError("predictions input needs a single level (1 or 2)");
    }
    if (c.backend == "uniform") {
    } else if (c.backend == "ngram") {
      if (mode != ScoringMode::kCausal) {
        throw ConfigError("the ngram backend supports causal mode only");
      }
      if (c.ngram_order < 1) throw ConfigError("ngram-order must be >= 1");
      if (!(c.ngram_k > 0.0)) throw ConfigError("ngram-k must be > 0");
      if (c.scores.empty()) {
        require_set(c.ngram_train, "ngram-train");
        require_path(c.ngram_train, "ngram training text");
      }
    } else if (c.backend == "table") {
      if (c.scores.empty()) {
        require_set(c.table, "table");
        require_path(c.table, "score table");
      }
    } else if (c.backend == "sidecar") {
      if (c.scores.empty()) require_set(c.sidecar, "sidecar");
    } else {
      throw ConfigError("backend must be uniform, ngram, table or sidecar");
    }
  }
}

// ---------------------------------------------------------------------------
// Data preparation.

struct PreparedData {
  Corpus corpus;
  OrderFilterResult order;
  SplitResult split;  // train/dev are canonical-order explicit relations
  std::optional<Corpus> test_corpus;
  // The evaluation relations; relation_id is the index into this list.
  std::vector<Relation> test;
};

inline ColumnMap load_columns(const std::string& path) {
  if (path.empty()) return ColumnMap::pdtb2();
  return ColumnMap::parse(read_file(path));
}

inline std::optional<SenseMapping> load_sense_map(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return SenseMapping::parse(read_file(path));
}

inline LabelSet load_labels(const ExperimentConfig& c, int level) {
  const std::string& path = level == 1 ? c.labels_4 : c.labels_11;
  if (path.empty()) {
    return level == 1 ? LabelSet::first_level() : LabelSet::eleven_way();
  }
  return LabelSet::parse(level, read_file(path));
}

inline void report_load(const Corpus& corpus, const std::string& name,
                        std::ostream& err) {
  if (corpus.files == 0) {
    err << "warning: " << name << " contains no annotation files\n";
  }
  for (const auto& e : corpus.errors) {
    err << "warning: " << e.file << ":" << e.line << ": " << e.message << '\n';
  }
  for (const auto& [label, count] : corpus.unmapped) {
    err << "warning: " << name << ": unmapped sense '" << label << "' x"
        << count << '\n';
  }
}

inline PreparedData prepare_data(const ExperimentConfig& c, std::ostream& err) {
  PreparedData d;
  const ColumnMap columns = load_columns(c.columns);
  const auto sense_map = load_sense_map(c.sense_map);
  CorpusLoadOptions lo;
  lo.extension = c.corpus_ext;
  lo.raw_dir = c.raw_dir;
  lo.raw_extension = c.raw_ext;
  lo.strict = c.strict;
  lo.sense_map = sense_map ? &*sense_map : nullptr;
  d.corpus = load_corpus(c.corpus, columns, lo);
  report_load(d.corpus, "corpus", err);

  SplitSpec spec;
  spec.train = parse_section_set(c.train_sections);
  spec.dev = parse_section_set(c.dev_sections);
  spec.test = parse_section_set(c.test_sections);
  d.order = filter_canonical_order(d.corpus.relations);
  d.split = split_pdtb(d.order.kept, spec);

  if (c.test_corpus.empty()) {
    d.test = d.split.test;
  } else {
    const ColumnMap test_columns =
        c.test_columns.empty() ? columns : load_columns(c.test_columns);
    const auto test_map = load_sense_map(c.test_sense_map);
    CorpusLoadOptions tlo;
    tlo.corpus = "test";
    tlo.extension = c.test_corpus_ext;
    tlo.raw_dir = c.test_raw_dir;
    tlo.raw_extension = c.test_raw_ext;
    tlo.strict = c.strict;
    tlo.sense_map = test_map ? &*test_map : nullptr;
    d.test_corpus = load_corpus(c.test_corpus, test_columns, tlo);
    report_load(*d.test_corpus, "test corpus", err);
    const std::set<std::string> files(c.test_files.begin(), c.test_files.end());
    for (const Relation& r : d.test_corpus->relations) {
      if (!r.is_implicit()) continue;
      if (!files.empty() && !files.count(r.source.file)) continue;
      d.test.push_back(r);
    }
  }
  return d;
}

// The test relations carrying a label at `labels`' level, with their ids.
struct LevelTest {
  LabelSet labels;
  std::vector<size_t> ids;
  std::vector<Relation> relations;
  size_t dropped = 0;
};

inline LevelTest level_test(const std::vector<Relation>& test,
                            const LabelSet& labels) {
  LevelTest lt;
  lt.labels = labels;
  for (size_t i = 0; i < test.size(); ++i) {
    if (labels.labels_of(test[i].senses).empty()) {
      ++lt.dropped;
      continue;
    }
    lt.ids.push_back(i);
    lt.relations.push_back(test[i]);
  }
  return lt;
}

// ---------------------------------------------------------------------------
// Components.

// Lazily opened connection shared by the scoring backend and classifier.
class SidecarHandle {
 public:
  explicit SidecarHandle(std::string endpoint) : endpoint_(std::move(endpoint)) {}

  std::shared_ptr<SidecarClient> client() {
    if (!client_) {
      client_ = std::make_shared<SidecarClient>(open_channel(endpoint_));
    }
    return client_;
  }
  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
  std::shared_ptr<SidecarClient> client_;
};

inline std::unique_ptr<ScoringBackend> make_backend(const ExperimentConfig& c,
                                                    SidecarHandle& sidecar) {
  if (c.backend == "uniform") return std::make_unique<UniformBackend>();
  if (c.backend == "ngram") {
    auto model = std::make_shared<const NGramModel>(NGramModel::train_text(
        read_file(c.ngram_train), c.ngram_order, c.ngram_k));
    return std::make_unique<NGramBackend>(std::move(model));
  }
  if (c.backend == "table") {
    return std::make_unique<TableBackend>(
        TableBackend::parse(read_file(c.table)));
  }
  return std::make_unique<SidecarBackend>(sidecar.client(), sidecar.endpoint());
}

inline std::unique_ptr<ExplicitClassifier> make_classifier(
    const ExperimentConfig& c, const PreparedData& d, int level,
    SidecarHandle& sidecar) {
  const LabelSet labels = load_labels(c, level);
  if (c.classifier == "sidecar") {
    return std::make_unique<SidecarClassifier>(sidecar.client(), labels,
                                               sidecar.endpoint());
  }
  const std::string& model_path = level == 1 ? c.model_1 : c.model_2;
  if (!model_path.empty()) {
    FrequencyModel m = FrequencyModel::from_json(
        nlohmann::json::parse(read_file(model_path)));
    if (!(m.labels() == labels)) {
      throw ConfigError("model " + model_path +
                        " was trained on a different label set");
    }
    return std::make_unique<FrequencyClassifier>(std::move(m));
  }
  return std::make_unique<FrequencyClassifier>(
      train_frequency(d.split.train, labels, c.classifier_k));
}

struct ScoredTest {
  std::vector<LogScoreVector> scores;
  std::vector<ConnectiveDistribution> dists;
};

// Scores every test relation, `jobs` relations at a time. Results are
// stored by index so output order never depends on scheduling.
inline ScoredTest score_test(const std::vector<Relation>& test,
                             const ConnectiveInventory& inv,
                             const ScoringBackend& backend, ScoringMode mode,
                             const ScoreOptions& opts, int jobs) {
  ScoredTest out;
  out.scores.resize(test.size());
  out.dists.resize(test.size());
  std::vector<std::exception_ptr> errors(test.size());
  auto work = [&](size_t start, size_t stride) {
    for (size_t i = start; i < test.size(); i += stride) {
      try {
        const CandidateSet cands = generate_candidates(test[i], inv, mode);
        out.scores[i] = score(backend, cands, opts);
        out.dists[i] = normalize(out.scores[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const size_t n_threads =
      std::min<size_t>(static_cast<size_t>(std::max(jobs, 1)),
                       std::max<size_t>(test.size(), 1));
  if (n_threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(work, t, n_threads);
    for (auto& th : threads) th.join();
  }
  for (size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const DataError& e) {
      throw DataError("test relation " + std::to_string(i) + ": " + e.what());
    } catch (const BackendError& e) {
      throw BackendError("test relation " + std::to_string(i) + ": " +
                         e.what());
    }
  }
  return out;
}

inline std::string scores_to_jsonl(const ScoredTest& s) {
  std::string out;
  for (size_t i = 0; i < s.scores.size(); ++i) {
    ojson j;
    j["relation_id"] = i;
    j["mode"] = std::string(mode_name(s.scores[i].mode));
    j["log_scores"] = s.scores[i].scores;
    j["conn_probs"] = s.dists[i].probs;
    out += j.dump() + '\n';
  }
  return out;
}

inline ScoredTest scores_from_jsonl(std::string_view text, size_t test_size,
                                    size_t inventory_size) {
  ScoredTest s;
  s.scores.resize(test_size);
  s.dists.resize(test_size);
  std::vector<bool> seen(test_size, false);
  size_t line_no = 0;
  for (const std::string& line : split(text, '\n')) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      const size_t id = j.at("relation_id").get<size_t>();
      if (id >= test_size || seen[id]) {
        throw DataError("unexpected relation_id " + std::to_string(id));
      }
      LogScoreVector v;
      v.mode = parse_mode(j.at("mode").get<std::string>());
      v.scores = j.at("log_scores").get<std::vector<double>>();
      if (v.scores.size() != inventory_size) {
        throw DataError("log_scores do not match the inventory");
      }
      s.dists[id] = normalize(v);
      s.scores[id] = std::move(v);
      seen[id] = true;
    } catch (const nlohmann::json::exception& e) {
      throw DataError("scores line " + std::to_string(line_no) + ": " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError("scores line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw DataError("scores file does not cover every test relation");
  }
  return s;
}

inline std::vector<Prediction> predict_level(
    const LevelTest& lt, const ScoredTest& scored,
    const ConnectiveInventory& inv, const ExplicitClassifier& clf,
    InferenceMethod method) {
  std::vector<Prediction> out;
  out.reserve(lt.ids.size());
  for (size_t k = 0; k < lt.ids.size(); ++k) {
    const size_t id = lt.ids[k];
    const Relation& r = lt.relations[k];
    Prediction p =
        predict_with(method, scored.dists[id], inv, clf, r.arg1, r.arg2);
    p.relation_id = id;
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output.

class ArtifactWriter {
 public:
  ArtifactWriter(std::string dir, std::string fingerprint)
      : dir_(std::move(dir)), fingerprint_(std::move(fingerprint)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  bool enabled() const { return !dir_.empty(); }
  const std::string& fingerprint() const { return fingerprint_; }

  void write(const std::string& name, const std::string& content) {
    if (!enabled()) return;
    const auto path = std::filesystem::path(dir_) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + path.string());
    f << content;
    written_.push_back(name);
  }

  // JSON reports carry the config fingerprint.
  void write_json(const std::string& name, ojson doc) {
    doc["config_fingerprint"] = fingerprint_;
    write(name, doc.dump(2) + '\n');
  }

  // Lists every artifact of this invocation.
  void write_manifest(const ojson& config) {
    if (!enabled()) return;
    ojson m;
    m["config_fingerprint"] = fingerprint_;
    m["config"] = config;
    std::vector<std::string> files = written_;
    std::sort(files.begin(), files.end());
    m["artifacts"] = files;
    write("manifest.json", m.dump(2) + '\n');
  }

 private:
  std::string dir_;
  std::string fingerprint_;
  std::vector<std::string> written_;
};

inline std::string level_tag(int level) { return "level" + std::to_string(level); }

inline std::string level_title(int level) {
  return level == 1 ? "4-way (level 1)" : "11-way (level 2)";
}

// ---------------------------------------------------------------------------
// Commands. Each throws ConfigError / DataError / BackendError on failure.

inline void cmd_corpus_stats(const ExperimentConfig& c, std::ostream& out,
                             std::ostream& err) {
  validate_config(c, Command::kCorpusStats);
  const PreparedData d = prepare_data(c, err);
  ArtifactWriter w(c.out, config_fingerprint(c));

  const LabelSet l1 = load_labels(c, 1);
  const LabelSet l2 = load_labels(c, 2);
  const std::vector<std::pair<std::string, const std::vector<Relation>*>> splits =
      {{"train (explicit)", &d.split.train},
       {"dev (explicit)", &d.split.dev},
       {"test (implicit)", &d.test}};

  TextTable t({"Split", "4-Way", "11-Way"});
  ojson j;
  ojson js = ojson::object();
  for (const auto& [name, rels] : splits) {
    const SenseCounts s1 = corpus_stats(*rels, l1);
    const SenseCounts s2 = corpus_stats(*rels, l2);
    t.add({name, std::to_string(s1.relations), std::to_string(s2.relations)});
    js[name] = {{"level1", to_json(s1)}, {"level2", to_json(s2)}};
  }
  out << "Instances per split\n" << t.render() << '\n';
  out << "Explicit relations outside (arg1, conn, arg2) order: "
      << d.order.excluded << " of " << d.order.explicit_total << " ("
      << fixed2(d.order.excluded_percent()) << "%)";
  if (d.order.missing_spans > 0) {
    out << ", " << d.order.missing_spans << " without span data";
  }
  out << "\n\n";

  for (const LabelSet* labels : {&l1, &l2}) {
    std::vector<std::string> header = {"Label"};
    for (const auto& [name, rels] : splits) header.push_back(name);
    TextTable per(std::move(header));
    std::vector<SenseCounts> counts;
    for (const auto& [name, rels] : splits) {
      counts.push_back(corpus_stats(*rels, *labels));
    }
    for (size_t i = 0; i < labels->size(); ++i) {
      std::vector<std::string> row = {labels->name(i)};
      for (const auto& s : counts) row.push_back(std::to_string(s.per_label[i]));
      per.add(std::move(row));
    }
    out << "Per-sense counts, " << level_title(labels->level()) << '\n'
        << per.render() << '\n';
  }

  j["files"] = d.corpus.files;
  j["lines"] = d.corpus.lines;
  j["relations"] = d.corpus.relations.size();
  j["skipped"] = d.corpus.skipped;
  j["skipped_by_type"] = d.corpus.skipped_by_type;
  j["record_errors"] = d.corpus.errors.size();
  j["unmapped_senses"] = d.corpus.unmapped;
  j["order_filter"] = {{"explicit_total", d.order.explicit_total},
                       {"excluded", d.order.excluded},
                       {"excluded_percent", d.order.excluded_percent()},
                       {"missing_spans", d.order.missing_spans}};
  j["split_dropped"] = {{"uncovered_section", d.split.dropped_uncovered},
                        {"kind_mismatch", d.split.dropped_kind}};
  j["splits"] = std::move(js);
  if (d.test_corpus) {
    j["test_corpus"] = {{"files", d.test_corpus->files},
                        {"relations", d.test_corpus->relations.size()},
                        {"skipped", d.test_corpus->skipped},
                        {"record_errors", d.test_corpus->errors.size()},
                        {"unmapped_senses", d.test_corpus->unmapped}};
  }
  w.write_json("corpus_stats.json", std::move(j));
  w.write("test_relations.jsonl", relations_to_jsonl(d.test));
  w.write_manifest(config_to_json(c));
}

inline void cmd_train_classifier(const ExperimentConfig& c, std::ostream& out,
                                 std::ostream& err) {
  validate_config(c, Command::kTrainClassifier);
  const PreparedData d = prepare_data(c, err);
  ArtifactWriter w(c.out, config_fingerprint(c));
  for (int level : config_levels(c)) {
    const FrequencyModel m =
        train_frequency(d.split.train, load_labels(c, level), c.classifier_k);
    w.write("model_" + level_tag(level) + ".json", m.to_json().dump(2) + '\n');
    out << level_title(level) << ": " << m.rows().size() << " connectives, "
        << m.train_stats().relations_used << " relations ("
        << m.train_stats().relations_dropped << " without a level-" << level
        << " label), fingerprint " << m.fingerprint() << '\n';
  }
  w.write_manifest(config_to_json(c));
}

// State shared by the scoring-based commands.
struct Session {
  ExperimentConfig config;
  PreparedData data;
  ConnectiveInventory inventory;
  SidecarHandle sidecar;
  std::unique_ptr<ScoringBackend> backend;

  Session(const ExperimentConfig& c, Command cmd, std::ostream& err)
      : config(c), sidecar(c.sidecar) {
    validate_config(c, cmd);
    inventory = ConnectiveInventory::parse(read_file(c.inventory));
    data = prepare_data(c, err);
  }

  ScoredTest scored() {
    if (!config.scores.empty()) {
      return scores_from_jsonl(read_file(config.scores), data.test.size(),
                               inventory.size());
    }
    if (!backend) backend = make_backend(config, sidecar);
    ScoreOptions opts;
    opts.length_penalty = config.length_penalty;
    return score_test(data.test, inventory, *backend, parse_mode(config.mode),
                      opts, config.jobs);
  }

  std::string backend_id() {
    if (!config.scores.empty()) return "scores:" + config.scores;
    if (!backend) backend = make_backend(config, sidecar);
    return backend->id();
  }

  std::unique_ptr<ExplicitClassifier> classifier(int level) {
    return make_classifier(config, data, level, sidecar);
  }
};

inline void cmd_score(const ExperimentConfig& c, std::ostream& out,
                      std::ostream& err) {
  Session s(c, Command::kScore, err);
  ArtifactWriter w(c.out, config_fingerprint(c));
  const ScoredTest scored = s.scored();
  const std::string jsonl = scores_to_jsonl(scored);
  if (w.enabled()) {
    w.write("scores.jsonl", jsonl);
    out << "scored " << scored.scores.size() << " relations with "
        << s.backend_id() << '\n';
  } else {
    out << jsonl;
  }
  w.write_manifest(config_to_json(c));
}

inline std::string predictions_to_jsonl(
    const std::vector<std::vector<Prediction>>& by_method,
    const LabelSet& labels, const ConnectiveInventory& inv, bool conn_probs) {
  std::string out;
  if (by_method.empty()) return out;
  for (size_t i = 0; i < by_method.front().size(); ++i) {
    for (const auto& preds : by_method) {
      out += to_json(preds[i], labels, inv, conn_probs).dump() + '\n';
    }
  }
  return out;
}

inline void cmd_predict(const ExperimentConfig& c, std::ostream& out,
                        std::ostream& err) {
  Session s(c, Command::kPredict, err);
  ArtifactWriter w(c.out, config_fingerprint(c));
  const ScoredTest scored = s.scored();
  for (int level : config_levels(c)) {
    const auto clf = s.classifier(level);
    const LevelTest lt = level_test(s.data.test, clf->labels());
    std::vector<std::vector<Prediction>> by_method;
    for (InferenceMethod m : config_methods(c)) {
      by_method.push_back(predict_level(lt, scored, s.inventory, *clf, m));
    }
    const std::string jsonl =
        predictions_to_jsonl(by_method, clf->labels(), s.inventory, c.conn_probs);
    if (w.enabled()) {
      w.write("predictions_" + level_tag(level) + ".jsonl", jsonl);
      out << level_title(level) << ": " << lt.ids.size() << " relations\n";
    } else {
      out << jsonl;
    }
  }
  w.write_manifest(config_to_json(c));
}

// Predictions of `method` read from a predictions file, aligned to `lt`.
inline std::vector<Prediction> read_predictions(const std::string& path,
                                                const LevelTest& lt,
                                                const ConnectiveInventory& inv,
                                                InferenceMethod method) {
  std::map<size_t, Prediction> by_id;
  size_t line_no = 0;
  for (const std::string& line : split(read_file(path), '\n')) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    Prediction p = prediction_from_json(j, lt.labels, inv);
    if (p.method != method) continue;
    by_id[p.relation_id] = std::move(p);
  }
  std::vector<Prediction> out;
  for (size_t id : lt.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw DataError(path + ": no " + std::string(method_name(method)) +
                      " prediction for relation " + std::to_string(id));
    }
    out.push_back(it->second);
  }
  return out;
}

struct LevelEvaluation {
  LevelTest test;
  std::vector<std::pair<std::string, EvalReport>> reports;
  std::map<InferenceMethod, std::vector<Prediction>> predictions;
};

inline LevelEvaluation evaluate_level(Session& s, const ScoredTest& scored,
                                      int level) {
  const ExperimentConfig& c = s.config;
  const auto clf = s.classifier(level);
  LevelEvaluation ev;
  ev.test = level_test(s.data.test, clf->labels());
  const std::vector<GoldLabels> golds =
      gold_labels(ev.test.relations, ev.test.labels);
  const std::string backend = s.backend_id();
  for (InferenceMethod m : config_methods(c)) {
    std::vector<Prediction> preds =
        c.predictions.empty()
            ? predict_level(ev.test, scored, s.inventory, *clf, m)
            : read_predictions(c.predictions, ev.test, s.inventory, m);
    EvalReport r = score_predictions(preds, golds, ev.test.labels);
    r.metadata["method"] = std::string(method_name(m));
    r.metadata["backend"] = backend;
    r.metadata["classifier"] = clf->id();
    ev.reports.emplace_back(
        m == InferenceMethod::kPipeline ? "Pipeline" : "+ Margin", std::move(r));
    ev.predictions[m] = std::move(preds);
  }
  const std::string mcs_label = level == 1 ? c.mcs_label_1 : c.mcs_label_2;
  ev.reports.emplace_back(
      "Most Common Sense",
      baseline_most_common_sense(ev.test.relations, ev.test.labels, mcs_label));
  ev.reports.emplace_back(
      "Most Common Conn (" + c.mcc_connective + ")",
      baseline_most_common_connective(ev.test.relations, *clf, c.mcc_connective));
  ev.reports.emplace_back("Gold Connective",
                          upper_bound_gold_connective(ev.test.relations, *clf));
  return ev;
}

inline void write_evaluation(ArtifactWriter& w, std::ostream& out, int level,
                             const LevelEvaluation& ev) {
  ojson j;
  j["level"] = level;
  j["test_size"] = ev.test.ids.size();
  j["dropped_without_label"] = ev.test.dropped;
  ojson reports = ojson::object();
  for (const auto& [name, r] : ev.reports) reports[name] = to_json(r);
  j["reports"] = std::move(reports);
  const std::string table = eval_table(ev.reports);
  std::string text = level_title(level) + ", " +
                     std::to_string(ev.test.ids.size()) + " test relations\n" +
                     table;
  for (const auto& [name, r] : ev.reports) {
    if (name == "Pipeline" || name == "+ Margin") {
      text += "\nConfusion (" + name + ")\n" + confusion_table(r);
    }
  }
  out << text << '\n';
  w.write_json("eval_" + level_tag(level) + ".json", std::move(j));
  w.write("eval_" + level_tag(level) + ".txt", text);
}

inline void cmd_evaluate(const ExperimentConfig& c, std::ostream& out,
                         std::ostream& err) {
  Session s(c, Command::kEvaluate, err);
  ArtifactWriter w(c.out, config_fingerprint(c));
  const ScoredTest scored = c.predictions.empty() ? s.scored() : ScoredTest{};
  for (int level : config_levels(c)) {
    write_evaluation(w, out, level, evaluate_level(s, scored, level));
  }
  w.write_manifest(config_to_json(c));
}

// A distribution with all mass on one connective.
inline ConnectiveDistribution one_hot(size_t size, size_t index) {
  ConnectiveDistribution d;
  d.probs.assign(size, 0.0);
  d.probs[index] = 1.0;
  return d;
}

inline std::vector<std::pair<std::string, AgreementReport>> agreement_rows(
    Session& s, const ScoredTest& scored, const LevelTest& lt,
    const ExplicitClassifier& clf) {
  std::vector<std::pair<std::string, AgreementReport>> rows;
  for (const std::string& probe : s.config.probes) {
    const auto idx = s.inventory.index_of(probe);
    if (!idx) continue;
    std::vector<ConnectiveDistribution> dists(
        lt.ids.size(), one_hot(s.inventory.size(), *idx));
    rows.emplace_back("always '" + probe + "'",
                      agreement(lt.relations, dists, s.inventory, clf));
  }
  std::vector<ConnectiveDistribution> dists;
  for (size_t id : lt.ids) dists.push_back(scored.dists[id]);
  rows.emplace_back(s.backend_id(),
                    agreement(lt.relations, dists, s.inventory, clf));
  return rows;
}

inline void write_agreement(ArtifactWriter& w, std::ostream& out, int level,
                            const std::vector<std::pair<std::string, AgreementReport>>& rows) {
  ojson j;
  j["level"] = level;
  ojson rj = ojson::object();
  for (const auto& [name, r] : rows) rj[name] = to_json(r);
  j["scorers"] = std::move(rj);
  const std::string text =
      "Agreement, " + level_title(level) + "\n" + agreement_table(rows);
  out << text << '\n';
  w.write_json("agreement_" + level_tag(level) + ".json", std::move(j));
  w.write("agreement_" + level_tag(level) + ".txt", text);
}

inline void cmd_agreement(const ExperimentConfig& c, std::ostream& out,
                          std::ostream& err) {
  Session s(c, Command::kAgreement, err);
  ArtifactWriter w(c.out, config_fingerprint(c));
  const ScoredTest scored = s.scored();
  for (int level : config_levels(c)) {
    const auto clf = s.classifier(level);
    const LevelTest lt = level_test(s.data.test, clf->labels());
    write_agreement(w, out, level, agreement_rows(s, scored, lt, *clf));
  }
  w.write_manifest(config_to_json(c));
}

inline void write_confusion(ArtifactWriter& w, std::ostream& out, Session& s,
                            const ScoredTest& scored) {
  const ConnectiveConfusion cc = connective_confusion(
      s.data.test, scored.dists, s.inventory, s.config.top_k);
  const std::string csv = to_csv(cc);
  if (w.enabled()) {
    w.write("connective_confusion.csv", csv);
    out << "connective confusion: " << cc.predicted.size() << " predicted x "
        << cc.gold.size() << " gold connectives\n";
  } else {
    out << csv;
  }
}

inline void cmd_confusion(const ExperimentConfig& c, std::ostream& out,
                          std::ostream& err) {
  Session s(c, Command::kConfusion, err);
  ArtifactWriter w(c.out, config_fingerprint(c));
  write_confusion(w, out, s, s.scored());
  w.write_manifest(config_to_json(c));
}

inline LabelShiftReport shift_for(const LevelEvaluation& ev) {
  const auto p = ev.predictions.find(InferenceMethod::kPipeline);
  const auto m = ev.predictions.find(InferenceMethod::kMarginal);
  if (p == ev.predictions.end() || m == ev.predictions.end()) {
    throw ConfigError("shift report needs both inference methods");
  }
  return label_shift_report(p->second, m->second, ev.test.labels);
}

inline void write_shift(ArtifactWriter& w, std::ostream& out, int level,
                        const LabelShiftReport& r) {
  const std::string text =
      "Label shift pipeline -> marginal, " + level_title(level) + "\n" +
      shift_table(r);
  out << text << '\n';
  ojson j = to_json(r);
  j["level"] = level;
  w.write_json("shift_" + level_tag(level) + ".json", std::move(j));
  w.write("shift_" + level_tag(level) + ".txt", text);
}

inline void cmd_shift_report(const ExperimentConfig& c, std::ostream& out,
                             std::ostream& err) {
  ExperimentConfig both = c;
  both.method = "both";
  Session s(both, Command::kShiftReport, err);
  ArtifactWriter w(c.out, config_fingerprint(c));
  const ScoredTest scored = c.predictions.empty() ? s.scored() : ScoredTest{};
  for (int level : config_levels(c)) {
    const auto clf = s.classifier(level);
    LevelEvaluation ev;
    ev.test = level_test(s.data.test, clf->labels());
    for (InferenceMethod m :
         {InferenceMethod::kPipeline, InferenceMethod::kMarginal}) {
      ev.predictions[m] =
          c.predictions.empty()
              ? predict_level(ev.test, scored, s.inventory, *clf, m)
              : read_predictions(c.predictions, ev.test, s.inventory, m);
    }
    write_shift(w, out, level, shift_for(ev));
  }
  w.write_manifest(config_to_json(c));
}

// End to end: statistics, classifiers, scores, predictions, evaluation,
// agreement, connective confusion and label shifts.
inline void cmd_run(const ExperimentConfig& c, std::ostream& out,
                    std::ostream& err) {
  Session s(c, Command::kRun, err);
  ArtifactWriter w(c.out, config_fingerprint(c));
  const LabelSet l1 = load_labels(c, 1);
  const LabelSet l2 = load_labels(c, 2);

  ojson stats;
  stats["explicit_order_excluded"] = s.data.order.excluded;
  stats["explicit_total"] = s.data.order.explicit_total;
  stats["train"] = {{"level1", corpus_stats(s.data.split.train, l1).relations},
                    {"level2", corpus_stats(s.data.split.train, l2).relations}};
  stats["dev"] = {{"level1", corpus_stats(s.data.split.dev, l1).relations},
                  {"level2", corpus_stats(s.data.split.dev, l2).relations}};
  stats["test"] = {{"level1", corpus_stats(s.data.test, l1).relations},
                   {"level2", corpus_stats(s.data.test, l2).relations}};
  w.write_json("corpus_stats.json", std::move(stats));

  const ScoredTest scored = s.scored();
  w.write("scores.jsonl", scores_to_jsonl(scored));
  write_confusion(w, out, s, scored);

  for (int level : config_levels(c)) {
    const auto clf = s.classifier(level);
    if (const auto* f = dynamic_cast<const FrequencyClassifier*>(clf.get())) {
      w.write("model_" + level_tag(level) + ".json",
              f->model().to_json().dump(2) + '\n');
    }
    LevelEvaluation ev = evaluate_level(s, scored, level);
    std::vector<std::vector<Prediction>> by_method;
    for (InferenceMethod m : config_methods(c)) {
      by_method.push_back(ev.predictions[m]);
    }
    w.write("predictions_" + level_tag(level) + ".jsonl",
            predictions_to_jsonl(by_method, ev.test.labels, s.inventory,
                                 c.conn_probs));
    write_evaluation(w, out, level, ev);
    write_agreement(w, out, level, agreement_rows(s, scored, ev.test, *clf));
    if (ev.predictions.size() == 2) write_shift(w, out, level, shift_for(ev));

    if (c.runs > 1) {
      std::map<std::string, std::vector<EvalReport>> per_method;
      for (const auto& [name, r] : ev.reports) per_method[name].push_back(r);
      for (int run = 1; run < c.runs; ++run) {
        const ScoredTest again = s.scored();
        const LevelEvaluation ev2 = evaluate_level(s, again, level);
        for (const auto& [name, r] : ev2.reports) per_method[name].push_back(r);
      }
      ojson agg = ojson::object();
      for (const auto& [name, reports] : per_method) {
        agg[name] = to_json(aggregate_runs(reports));
      }
      w.write_json("eval_runs_" + level_tag(level) + ".json", std::move(agg));
    }
  }
  w.write_manifest(config_to_json(c));
}

}  // namespace discex

#endif  // DISCEX_EXPERIMENT_HPP_
