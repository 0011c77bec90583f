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

// Corpus ingestion and preparation: pipe-record parsing, section splits,
// argument-order filtering, sense statistics and JSON Lines export.

#ifndef DISCEX_CORPUS_HPP_
#define DISCEX_CORPUS_HPP_

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "discex/biodrb.hpp"
#include "discex/columns.hpp"
#include "discex/errors.hpp"
#include "discex/relation.hpp"
#include "discex/sense.hpp"
#include "discex/text.hpp"

namespace discex {

struct RecordError {
  std::string file;
  size_t line = 0;
  std::string message;
};

struct PipeParseOptions {
  std::string corpus = "pdtb2";
  // File id used when the column map has no file column.
  std::string file_id;
  // Document text for span-based extraction; required when the column map
  // lacks argument text columns.
  std::optional<std::string_view> raw_text;
  // Strict mode throws on the first malformed record instead of collecting.
  bool strict = false;
  // When set, sense labels are translated through this table (BioDRB).
  const SenseMapping* sense_map = nullptr;
};

struct PipeParseResult {
  std::vector<Relation> relations;
  size_t lines = 0;
  size_t skipped = 0;
  std::map<std::string, size_t> skipped_by_type;
  std::vector<RecordError> errors;
  UnmappedReport unmapped;
};

namespace internal {

inline std::string cut_spans(std::string_view raw, const SpanList& spans) {
  std::string out;
  for (const CharSpan& s : spans) {
    if (s.begin < 0 || static_cast<size_t>(s.end) > raw.size()) {
      throw DataError("span " + std::to_string(s.begin) + ".." +
                      std::to_string(s.end) + " outside document text");
    }
    if (!out.empty()) out.push_back(' ');
    out.append(raw.substr(static_cast<size_t>(s.begin),
                          static_cast<size_t>(s.end - s.begin)));
  }
  return out;
}

inline int parse_section(const std::string& text) {
  const std::string t = trim(text);
  size_t used = 0;
  int v = -1;
  try {
    v = std::stoi(t, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || v < 0) {
    throw DataError("bad section id '" + text + "'");
  }
  return v;
}

// Returns std::nullopt for relation types that are skipped.
inline std::optional<Relation> parse_record(
    const std::vector<std::string>& fields, const ColumnMap& map,
    const PipeParseOptions& opts, UnmappedReport& unmapped) {
  auto field = [&fields](const ColumnMap::Index& idx) -> std::string {
    return idx ? fields[*idx] : std::string();
  };
  const std::string type = trim(fields[map.type]);
  Relation rel;
  if (type == "Explicit") {
    rel.kind = RelationKind::kExplicit;
  } else if (type == "Implicit") {
    rel.kind = RelationKind::kImplicit;
  } else {
    return std::nullopt;
  }

  rel.source.corpus = opts.corpus;
  if (map.section) rel.source.section = parse_section(fields[*map.section]);
  rel.source.file = map.file ? trim(fields[*map.file]) : opts.file_id;

  if (map.arg1_span) rel.arg1_span = parse_span_list(fields[*map.arg1_span]);
  if (map.arg2_span) rel.arg2_span = parse_span_list(fields[*map.arg2_span]);
  if (map.connective_span) {
    rel.connective_span = parse_span_list(fields[*map.connective_span]);
  }

  auto text_of = [&](const ColumnMap::Index& text_col,
                     const SpanList& spans) -> std::string {
    if (text_col) return fields[*text_col];
    if (!opts.raw_text) throw DataError("no raw text for span extraction");
    return cut_spans(*opts.raw_text, spans);
  };
  rel.arg1 = text_of(map.arg1, rel.arg1_span);
  rel.arg2 = text_of(map.arg2, rel.arg2_span);

  if (rel.is_explicit()) {
    rel.connective = trim(field(map.connective_head));
    if (rel.connective.empty() && !rel.connective_span.empty() &&
        opts.raw_text) {
      rel.connective = trim(cut_spans(*opts.raw_text, rel.connective_span));
    }
    if (rel.connective.empty()) {
      throw DataError("explicit relation without connective");
    }
  } else {
    rel.connective = trim(field(map.implicit_connective));
  }

  std::vector<std::string> raw_senses;
  raw_senses.push_back(fields[map.sense1]);
  if (map.sense2) raw_senses.push_back(fields[*map.sense2]);
  bool any_sense = false;
  for (const std::string& raw : raw_senses) {
    if (trim_view(raw).empty()) continue;
    any_sense = true;
    if (opts.sense_map != nullptr) {
      SenseMapResult m = map_biodrb_sense(*opts.sense_map, raw, &unmapped);
      if (m.mapped()) rel.senses.push_back(*m.path);
    } else {
      rel.senses.push_back(sense_path_or_throw(raw));
    }
  }
  if (!any_sense) throw DataError("relation without sense annotation");
  if (rel.senses.empty()) {
    // Every sense was unmapped; reported through `unmapped`.
    return std::nullopt;
  }
  validate_relation(rel);
  return rel;
}

}  // namespace internal

// Parses `|`-separated records, one per line. Explicit and Implicit
// relations are kept; other relation types are skipped and counted.
// Every input line ends up kept, skipped or errored.
inline PipeParseResult parse_pipe_file(std::string_view bytes,
                                       const ColumnMap& map,
                                       const PipeParseOptions& opts = {}) {
  map.validate();
  if (const size_t bad = find_invalid_utf8(bytes);
      bad != std::string_view::npos) {
    throw DataError("file " + opts.file_id +
                    ": invalid UTF-8 at byte offset " + std::to_string(bad));
  }
  if (map.needs_raw_text() && !opts.raw_text) {
    throw DataError("file " + opts.file_id +
                    ": column map needs raw document text");
  }
  PipeParseResult result;
  std::vector<std::string> lines = split(bytes, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  result.lines = lines.size();

  for (size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t line_no = i + 1;
    if (trim_view(line).empty()) {
      ++result.skipped;
      ++result.skipped_by_type["<blank>"];
      continue;
    }
    const std::vector<std::string> fields = split(line, '|');
    try {
      if (fields.size() != map.field_count) {
        throw DataError("expected " + std::to_string(map.field_count) +
                        " fields, found " + std::to_string(fields.size()));
      }
      std::optional<Relation> rel =
          internal::parse_record(fields, map, opts, result.unmapped);
      if (rel) {
        rel->source.line = line_no;
        result.relations.push_back(std::move(*rel));
      } else {
        ++result.skipped;
        const std::string type = trim(fields[map.type]);
        const bool known_type = type == "Explicit" || type == "Implicit";
        ++result.skipped_by_type[known_type ? "<unmapped-sense>" : type];
      }
    } catch (const DataError& e) {
      if (opts.strict) {
        throw DataError(opts.file_id + ":" + std::to_string(line_no) + ": " +
                        e.what());
      }
      result.errors.push_back({opts.file_id, line_no, e.what()});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Loading whole corpora from files and directories.

struct CorpusLoadOptions {
  std::string corpus = "pdtb2";
  std::string extension = ".pipe";  // empty accepts every regular file
  // Directory of raw document texts named after each annotation file's stem
  // plus `raw_extension`.
  std::string raw_dir;
  std::string raw_extension;
  bool strict = false;
  const SenseMapping* sense_map = nullptr;
};

struct Corpus {
  std::vector<Relation> relations;
  size_t files = 0;
  size_t lines = 0;
  size_t skipped = 0;
  std::map<std::string, size_t> skipped_by_type;
  std::vector<RecordError> errors;
  UnmappedReport unmapped;
};

// Annotation files under `paths`, in sorted order. Directories are walked
// recursively.
inline std::vector<std::filesystem::path> corpus_files(
    const std::vector<std::string>& paths, std::string_view extension) {
  namespace fs = std::filesystem;
  std::vector<fs::path> out;
  for (const std::string& p : paths) {
    const fs::path path(p);
    if (fs::is_regular_file(path)) {
      out.push_back(path);
    } else if (fs::is_directory(path)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(path)) {
        if (!entry.is_regular_file()) continue;
        if (!extension.empty() && entry.path().extension() != extension) {
          continue;
        }
        found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      throw ConfigError("corpus path does not exist: " + p);
    }
  }
  return out;
}

inline Corpus load_corpus(const std::vector<std::string>& paths,
                          const ColumnMap& map,
                          const CorpusLoadOptions& opts = {}) {
  Corpus corpus;
  for (const auto& path : corpus_files(paths, opts.extension)) {
    const std::string bytes = read_file(path.string());
    std::string raw;
    PipeParseOptions po;
    po.corpus = opts.corpus;
    po.file_id = path.stem().string();
    po.strict = opts.strict;
    po.sense_map = opts.sense_map;
    if (map.needs_raw_text() || !opts.raw_dir.empty()) {
      const auto raw_path = std::filesystem::path(opts.raw_dir) /
                            (path.stem().string() + opts.raw_extension);
      raw = read_file(raw_path.string());
      po.raw_text = raw;
    }
    PipeParseResult r = parse_pipe_file(bytes, map, po);
    ++corpus.files;
    corpus.lines += r.lines;
    corpus.skipped += r.skipped;
    for (const auto& [k, v] : r.skipped_by_type) corpus.skipped_by_type[k] += v;
    for (const auto& [k, v] : r.unmapped) corpus.unmapped[k] += v;
    for (auto& e : r.errors) {
      e.file = path.string();
      corpus.errors.push_back(std::move(e));
    }
    for (auto& rel : r.relations) corpus.relations.push_back(std::move(rel));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Splits.

// Parses "2-20,23,24" into a set of section numbers.
inline std::set<int> parse_section_set(std::string_view text) {
  std::set<int> out;
  for (const std::string& piece : split(text, ',')) {
    const std::string t = trim(piece);
    if (t.empty()) continue;
    try {
      const size_t dash = t.find('-');
      size_t used = 0;
      if (dash == std::string::npos) {
        const int v = std::stoi(t, &used);
        if (used != t.size() || v < 0) throw std::invalid_argument(t);
        out.insert(v);
      } else {
        const std::string a = trim(t.substr(0, dash));
        const std::string b = trim(t.substr(dash + 1));
        const int lo = std::stoi(a, &used);
        if (used != a.size()) throw std::invalid_argument(t);
        const int hi = std::stoi(b, &used);
        if (used != b.size() || lo < 0 || hi < lo) {
          throw std::invalid_argument(t);
        }
        for (int s = lo; s <= hi; ++s) out.insert(s);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad section list element '" + t + "'");
    }
  }
  return out;
}

struct SplitSpec {
  std::set<int> train;
  std::set<int> dev;
  std::set<int> test;

  // Train on sections 2-20 and 23-24, develop on 0-1, test on 21-22.
  static SplitSpec standard() {
    SplitSpec s;
    s.train = parse_section_set("2-20,23,24");
    s.dev = parse_section_set("0-1");
    s.test = parse_section_set("21-22");
    return s;
  }

  void validate() const {
    auto disjoint = [](const std::set<int>& a, const std::set<int>& b) {
      for (int x : a) {
        if (b.count(x)) return false;
      }
      return true;
    };
    if (!disjoint(train, dev) || !disjoint(train, test) ||
        !disjoint(dev, test)) {
      throw ConfigError("split: train, dev and test sections overlap");
    }
  }
};

struct SplitResult {
  std::vector<Relation> train;  // explicit
  std::vector<Relation> dev;    // explicit
  std::vector<Relation> test;   // implicit
  size_t dropped_uncovered = 0;
  size_t dropped_kind = 0;  // e.g. implicit relations in training sections

  size_t dropped() const { return dropped_uncovered + dropped_kind; }
};

inline SplitResult split_pdtb(const std::vector<Relation>& relations,
                              const SplitSpec& spec) {
  spec.validate();
  SplitResult out;
  for (const Relation& r : relations) {
    const int s = r.source.section;
    if (spec.train.count(s)) {
      if (r.is_explicit()) {
        out.train.push_back(r);
      } else {
        ++out.dropped_kind;
      }
    } else if (spec.dev.count(s)) {
      if (r.is_explicit()) {
        out.dev.push_back(r);
      } else {
        ++out.dropped_kind;
      }
    } else if (spec.test.count(s)) {
      if (r.is_implicit()) {
        out.test.push_back(r);
      } else {
        ++out.dropped_kind;
      }
    } else {
      ++out.dropped_uncovered;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Argument-order filtering.

// Canonical order: all of arg1 precedes the connective, and all of the
// connective precedes arg2.
inline bool is_canonical_order(const Relation& r) {
  if (r.arg1_span.empty() || r.connective_span.empty() ||
      r.arg2_span.empty()) {
    return false;
  }
  return span_max(r.arg1_span) <= span_min(r.connective_span) &&
         span_max(r.connective_span) <= span_min(r.arg2_span);
}

struct OrderFilterResult {
  std::vector<Relation> kept;
  size_t excluded = 0;        // explicit relations left out
  size_t missing_spans = 0;   // subset of `excluded` lacking span data
  size_t explicit_total = 0;  // explicit relations seen

  double excluded_percent() const {
    return explicit_total == 0 ? 0.0 : 100.0 * excluded / explicit_total;
  }
};

// Keeps explicit relations in (arg1, connective, arg2) order. Implicit
// relations pass through.
inline OrderFilterResult filter_canonical_order(
    const std::vector<Relation>& relations) {
  OrderFilterResult out;
  for (const Relation& r : relations) {
    if (r.is_implicit()) {
      out.kept.push_back(r);
      continue;
    }
    ++out.explicit_total;
    if (is_canonical_order(r)) {
      out.kept.push_back(r);
    } else {
      ++out.excluded;
      if (r.arg1_span.empty() || r.connective_span.empty() ||
          r.arg2_span.empty()) {
        ++out.missing_spans;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics.

struct SenseCounts {
  LabelSet labels;
  std::vector<size_t> per_label;
  size_t relations = 0;  // relations with at least one in-set label
  size_t dropped = 0;    // relations with no in-set label
};

// A relation with two senses counts once per distinct label.
inline SenseCounts corpus_stats(const std::vector<Relation>& relations,
                                const LabelSet& labels) {
  SenseCounts out;
  out.labels = labels;
  out.per_label.assign(labels.size(), 0);
  for (const Relation& r : relations) {
    const std::vector<size_t> ls = labels.labels_of(r.senses);
    if (ls.empty()) {
      ++out.dropped;
      continue;
    }
    ++out.relations;
    for (size_t l : ls) ++out.per_label[l];
  }
  return out;
}

// Relations carrying at least one label of `labels`.
inline std::vector<Relation> restrict_to_labels(
    const std::vector<Relation>& relations, const LabelSet& labels,
    size_t* dropped = nullptr) {
  std::vector<Relation> out;
  for (const Relation& r : relations) {
    if (labels.labels_of(r.senses).empty()) {
      if (dropped) ++*dropped;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON Lines export.

inline nlohmann::ordered_json relation_to_json(const Relation& r) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(kind_name(r.kind));
  j["connective"] = r.connective;
  j["arg1"] = r.arg1;
  j["arg2"] = r.arg2;
  nlohmann::ordered_json senses = nlohmann::ordered_json::array();
  for (const SensePath& s : r.senses) {
    nlohmann::ordered_json js;
    js["level1"] = std::string(top_sense_name(s.top));
    js["level2"] = s.second ? nlohmann::ordered_json(*s.second)
                            : nlohmann::ordered_json(nullptr);
    js["raw"] = s.raw;
    senses.push_back(std::move(js));
  }
  j["senses"] = std::move(senses);
  j["section"] = r.source.section >= 0 ? nlohmann::ordered_json(r.source.section)
                                       : nlohmann::ordered_json(nullptr);
  j["file"] = r.source.file;
  return j;
}

inline Relation relation_from_json(const nlohmann::json& j) {
  try {
    Relation r;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "Explicit") {
      r.kind = RelationKind::kExplicit;
    } else if (kind == "Implicit") {
      r.kind = RelationKind::kImplicit;
    } else {
      throw DataError("unknown relation kind '" + kind + "'");
    }
    r.connective = j.at("connective").get<std::string>();
    r.arg1 = j.at("arg1").get<std::string>();
    r.arg2 = j.at("arg2").get<std::string>();
    for (const auto& js : j.at("senses")) {
      SensePath s;
      const auto top = parse_top_sense(js.at("level1").get<std::string>());
      if (!top) throw DataError("bad level1 sense");
      s.top = *top;
      if (!js.at("level2").is_null()) {
        s.second = js.at("level2").get<std::string>();
        if (!is_second_level_of(s.top, *s.second)) {
          throw DataError("bad level2 sense '" + *s.second + "'");
        }
      }
      s.raw = js.at("raw").get<std::string>();
      r.senses.push_back(std::move(s));
    }
    r.source.section = j.at("section").is_null() ? -1 : j.at("section").get<int>();
    r.source.file = j.at("file").get<std::string>();
    validate_relation(r);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("relation JSON: ") + e.what());
  }
}

inline std::string relations_to_jsonl(const std::vector<Relation>& rels) {
  std::string out;
  for (const Relation& r : rels) {
    out += relation_to_json(r).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<Relation> relations_from_jsonl(std::string_view text) {
  std::vector<Relation> out;
  size_t line_no = 0;
  for (const std::string& line : split(text, '\n')) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    try {
      out.push_back(relation_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace discex

#endif  // DISCEX_CORPUS_HPP_
