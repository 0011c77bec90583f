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

// Report rendering: JSON documents, aligned plain-text tables and CSV.
// Tables print two decimals; JSON keeps full double precision.

#ifndef DISCEX_REPORT_HPP_
#define DISCEX_REPORT_HPP_

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "discex/corpus.hpp"
#include "discex/evaluation.hpp"
#include "discex/inference.hpp"

namespace discex {

using ojson = nlohmann::ordered_json;

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Left-aligned first column, right-aligned remaining columns.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) {
    rows_.push_back(std::move(header));
  }

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string render() const {
    std::vector<size_t> width;
    for (const auto& row : rows_) {
      if (width.size() < row.size()) width.resize(row.size(), 0);
      for (size_t i = 0; i < row.size(); ++i) {
        width[i] = std::max(width[i], row[i].size());
      }
    }
    std::ostringstream out;
    for (size_t r = 0; r < rows_.size(); ++r) {
      const auto& row = rows_[r];
      for (size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out << "  ";
        const std::string pad(width[i] - row[i].size(), ' ');
        out << (i == 0 ? row[i] + pad : pad + row[i]);
      }
      out << '\n';
      if (r == 0) {
        size_t total = 0;
        for (size_t w : width) total += w;
        out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
      }
    }
    return out.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// ---------------------------------------------------------------------------

inline ojson to_json(const EvalReport& r) {
  ojson j;
  j["level"] = r.level();
  j["labels"] = r.labels.names();
  j["total"] = r.total;
  j["matched"] = r.matched;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  ojson per = ojson::array();
  for (size_t c = 0; c < r.labels.size(); ++c) {
    ojson e;
    e["label"] = r.labels.name(c);
    e["precision"] = r.precision[c];
    e["recall"] = r.recall[c];
    e["f1"] = r.f1[c];
    e["support"] = r.support[c];
    per.push_back(std::move(e));
  }
  j["per_class"] = std::move(per);
  j["confusion"] = r.confusion;
  ojson meta = ojson::object();
  for (const auto& [k, v] : r.metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  return j;
}

// Column headings for text tables: "Exp" or "Exp.Conj".
inline std::string short_label(const std::string& label) {
  static const std::map<std::string, std::string, std::less<>> kAbbrev = {
      {"Temporal", "Temp"},         {"Contingency", "Cont"},
      {"Comparison", "Comp"},       {"Expansion", "Exp"},
      {"Asynchronous", "Async"},    {"Synchrony", "Sync"},
      {"Pragmatic cause", "PCause"}, {"Pragmatic condition", "PCond"},
      {"Condition", "Cond"},        {"Contrast", "Contr"},
      {"Pragmatic contrast", "PContr"},
      {"Concession", "Conc"},       {"Pragmatic concession", "PConc"},
      {"Conjunction", "Conj"},      {"Instantiation", "Inst"},
      {"Restatement", "Rest"},      {"Alternative", "Alt"},
      {"Exception", "Exc"}};
  std::string out;
  for (const std::string& part : split(label, '.')) {
    if (!out.empty()) out += '.';
    auto it = kAbbrev.find(part);
    out += it == kAbbrev.end() ? part : it->second;
  }
  return out;
}

// One row per named report: per-class F1, macro-F1 and accuracy.
inline std::string eval_table(
    const std::vector<std::pair<std::string, EvalReport>>& reports) {
  if (reports.empty()) return "";
  const LabelSet& labels = reports.front().second.labels;
  std::vector<std::string> header = {"Method"};
  for (const auto& name : labels.names()) header.push_back(short_label(name));
  header.push_back("Macro-F1");
  header.push_back("Acc");
  TextTable t(std::move(header));
  for (const auto& [name, r] : reports) {
    std::vector<std::string> row = {name};
    for (double f : r.f1) row.push_back(fixed2(f));
    row.push_back(fixed2(r.macro_f1));
    row.push_back(fixed2(r.accuracy));
    t.add(std::move(row));
  }
  return t.render();
}

inline std::string confusion_table(const EvalReport& r) {
  std::vector<std::string> header = {"gold \\ pred"};
  for (const auto& name : r.labels.names()) header.push_back(short_label(name));
  TextTable t(std::move(header));
  for (size_t g = 0; g < r.labels.size(); ++g) {
    std::vector<std::string> row = {short_label(r.labels.name(g))};
    for (size_t v : r.confusion[g]) row.push_back(std::to_string(v));
    t.add(std::move(row));
  }
  return t.render();
}

inline ojson to_json(const RunAggregate& a) {
  ojson j;
  j["runs"] = a.runs;
  j["labels"] = a.labels.names();
  ojson f1 = ojson::array();
  for (const auto& m : a.f1) f1.push_back({{"mean", m.mean}, {"stddev", m.stddev}});
  j["f1"] = std::move(f1);
  j["macro_f1"] = {{"mean", a.macro_f1.mean}, {"stddev", a.macro_f1.stddev}};
  j["accuracy"] = {{"mean", a.accuracy.mean}, {"stddev", a.accuracy.stddev}};
  return j;
}

inline ojson to_json(const AgreementReport& r) {
  ojson j;
  j["test_size"] = r.test_size;
  j["eligible"] = r.eligible;
  j["connective_matches"] = r.connective_matches;
  j["sense_matches"] = r.sense_matches;
  j["connective_percent"] = r.connective_percent();
  j["sense_percent"] = r.sense_percent();
  return j;
}

inline std::string agreement_table(
    const std::vector<std::pair<std::string, AgreementReport>>& rows) {
  TextTable t({"Scorer", "Conn", "Sense", "Eligible"});
  for (const auto& [name, r] : rows) {
    t.add({name, fixed2(r.connective_percent()), fixed2(r.sense_percent()),
           std::to_string(r.eligible)});
  }
  return t.render();
}

// Header row holds gold connectives; each following row starts with the
// predicted connective.
inline std::string to_csv(const ConnectiveConfusion& c) {
  std::string out = "predicted\\gold";
  for (const auto& g : c.gold) out += "," + csv_field(g);
  out += '\n';
  for (size_t r = 0; r < c.predicted.size(); ++r) {
    out += csv_field(c.predicted[r]);
    for (size_t v : c.counts[r]) out += "," + std::to_string(v);
    out += '\n';
  }
  return out;
}

inline ojson to_json(const LabelShiftReport& r) {
  ojson j;
  j["labels"] = r.labels.names();
  j["matrix"] = r.matrix;
  j["total"] = r.total;
  j["changed"] = r.changed;
  j["changed_fraction"] = r.changed_fraction();
  return j;
}

inline std::string shift_table(const LabelShiftReport& r) {
  std::vector<std::string> header = {"pipeline \\ marginal"};
  for (const auto& name : r.labels.names()) header.push_back(short_label(name));
  TextTable t(std::move(header));
  for (size_t g = 0; g < r.labels.size(); ++g) {
    std::vector<std::string> row = {short_label(r.labels.name(g))};
    for (size_t v : r.matrix[g]) row.push_back(std::to_string(v));
    t.add(std::move(row));
  }
  return t.render() + "changed: " + std::to_string(r.changed) + "/" +
         std::to_string(r.total) + " (" + fixed2(100.0 * r.changed_fraction()) +
         "%)\n";
}

inline ojson to_json(const SenseCounts& s) {
  ojson j;
  j["level"] = s.labels.level();
  j["relations"] = s.relations;
  j["dropped"] = s.dropped;
  ojson counts = ojson::object();
  for (size_t i = 0; i < s.labels.size(); ++i) {
    counts[s.labels.name(i)] = s.per_label[i];
  }
  j["per_label"] = std::move(counts);
  return j;
}

inline ojson to_json(const Prediction& p, const LabelSet& labels,
                     const ConnectiveInventory& inv, bool with_conn_probs) {
  ojson j;
  j["relation_id"] = p.relation_id;
  j["method"] = std::string(method_name(p.method));
  j["label"] = labels.name(p.label);
  j["top_connective"] = inv[p.top_connective];
  j["probs"] = p.probs.probs;
  if (with_conn_probs) j["conn_probs"] = p.connectives.probs;
  return j;
}

// Reads predictions written by to_json(Prediction).
inline Prediction prediction_from_json(const nlohmann::json& j,
                                       const LabelSet& labels,
                                       const ConnectiveInventory& inv) {
  try {
    Prediction p;
    p.relation_id = j.at("relation_id").get<size_t>();
    const std::string method = j.at("method").get<std::string>();
    if (method == "pipeline") {
      p.method = InferenceMethod::kPipeline;
    } else if (method == "marginal") {
      p.method = InferenceMethod::kMarginal;
    } else {
      throw DataError("unknown method '" + method + "'");
    }
    const auto label = labels.index_of(j.at("label").get<std::string>());
    if (!label) throw DataError("label outside the configured set");
    p.label = *label;
    const auto top = inv.index_of(j.at("top_connective").get<std::string>());
    if (!top) throw DataError("top connective outside the inventory");
    p.top_connective = *top;
    p.probs.probs = j.at("probs").get<std::vector<double>>();
    if (j.contains("conn_probs")) {
      p.connectives.probs = j["conn_probs"].get<std::vector<double>>();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("prediction JSON: ") + e.what());
  }
}

}  // namespace discex

#endif  // DISCEX_REPORT_HPP_
