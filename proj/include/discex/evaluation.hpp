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

// Evaluation: per-class F1, macro-F1, accuracy, baselines and upper bounds,
// connective/sense agreement and connective confusion matrices.
//
// Scores are on a 0-100 scale. A gold relation with two senses counts as
// correct when the prediction matches either one; the matched sense is the
// one credited. Unmatched relations are credited to their first sense.

#ifndef DISCEX_EVALUATION_HPP_
#define DISCEX_EVALUATION_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "discex/candidates.hpp"
#include "discex/classifier.hpp"
#include "discex/distribution.hpp"
#include "discex/errors.hpp"
#include "discex/inference.hpp"
#include "discex/relation.hpp"
#include "discex/sense.hpp"

namespace discex {

// Gold label indices of one relation (one or two, distinct).
using GoldLabels = std::vector<size_t>;

struct EvalReport {
  LabelSet labels;
  std::vector<double> precision;  // per class
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<size_t> support;  // credited gold count per class
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  size_t total = 0;
  size_t matched = 0;
  // confusion[gold][predicted]
  std::vector<std::vector<size_t>> confusion;
  std::map<std::string, std::string> metadata;

  int level() const { return labels.level(); }
};

inline EvalReport score_predictions(const std::vector<size_t>& predicted,
                                    const std::vector<GoldLabels>& golds,
                                    const LabelSet& labels) {
  if (predicted.size() != golds.size()) {
    throw DataError("evaluation: " + std::to_string(predicted.size()) +
                    " predictions for " + std::to_string(golds.size()) +
                    " gold relations");
  }
  const size_t n = labels.size();
  EvalReport r;
  r.labels = labels;
  r.total = predicted.size();
  r.confusion.assign(n, std::vector<size_t>(n, 0));
  r.support.assign(n, 0);
  std::vector<size_t> tp(n, 0), predicted_count(n, 0);
  for (size_t i = 0; i < predicted.size(); ++i) {
    const size_t p = predicted[i];
    if (p >= n) throw DataError("evaluation: predicted label out of range");
    const GoldLabels& g = golds[i];
    if (g.empty()) throw DataError("evaluation: relation without gold label");
    for (size_t l : g) {
      if (l >= n) throw DataError("evaluation: gold label out of range");
    }
    const bool hit = std::find(g.begin(), g.end(), p) != g.end();
    const size_t credited = hit ? p : g.front();
    ++r.confusion[credited][p];
    ++r.support[credited];
    ++predicted_count[p];
    if (hit) {
      ++tp[p];
      ++r.matched;
    }
  }
  r.precision.resize(n);
  r.recall.resize(n);
  r.f1.resize(n);
  double sum = 0.0;
  for (size_t c = 0; c < n; ++c) {
    const double prec =
        predicted_count[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / predicted_count[c];
    const double rec =
        r.support[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / r.support[c];
    r.precision[c] = 100.0 * prec;
    r.recall[c] = 100.0 * rec;
    // 2PR / (P + R) reduced to counts, so it is a single rounding.
    const size_t denom = predicted_count[c] + r.support[c];
    r.f1[c] = denom == 0 ? 0.0
                         : 100.0 * (2.0 * static_cast<double>(tp[c])) /
                               static_cast<double>(denom);
    sum += r.f1[c];
  }
  r.macro_f1 = sum / static_cast<double>(n);
  r.accuracy =
      r.total == 0 ? 0.0 : 100.0 * static_cast<double>(r.matched) / r.total;
  r.metadata["convention"] = "match-either";
  return r;
}

inline EvalReport score_predictions(const std::vector<Prediction>& preds,
                                    const std::vector<GoldLabels>& golds,
                                    const LabelSet& labels) {
  std::vector<size_t> labels_only;
  labels_only.reserve(preds.size());
  for (const Prediction& p : preds) labels_only.push_back(p.label);
  return score_predictions(labels_only, golds, labels);
}

// Gold labels for each relation. Every relation must carry an in-set label;
// use restrict_to_labels() first.
inline std::vector<GoldLabels> gold_labels(const std::vector<Relation>& rels,
                                           const LabelSet& labels) {
  std::vector<GoldLabels> out;
  out.reserve(rels.size());
  for (const Relation& r : rels) {
    GoldLabels g = labels.labels_of(r.senses);
    if (g.empty()) {
      throw DataError("relation " + r.source.file + ":" +
                      std::to_string(r.source.line) +
                      " has no label in the level-" +
                      std::to_string(labels.level()) + " label set");
    }
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Baselines and upper bounds.

inline std::string default_most_common_sense(int level) {
  return level == 1 ? "Expansion" : "Contingency.Cause";
}

inline EvalReport baseline_most_common_sense(const std::vector<Relation>& test,
                                             const LabelSet& labels,
                                             std::string_view label) {
  const auto idx = labels.index_of(label);
  if (!idx) {
    throw ConfigError("most-common-sense label '" + std::string(label) +
                      "' is not in the label set");
  }
  std::vector<size_t> predicted(test.size(), *idx);
  EvalReport r = score_predictions(predicted, gold_labels(test, labels), labels);
  r.metadata["method"] = "most-common-sense(" + std::string(label) + ")";
  return r;
}

inline EvalReport baseline_most_common_sense(const std::vector<Relation>& test,
                                             const LabelSet& labels) {
  return baseline_most_common_sense(test, labels,
                                    default_most_common_sense(labels.level()));
}

// Every relation is explicitated with the same connective.
inline EvalReport baseline_most_common_connective(
    const std::vector<Relation>& test, const ExplicitClassifier& clf,
    std::string_view connective = "but") {
  std::vector<size_t> predicted;
  predicted.reserve(test.size());
  for (const Relation& r : test) {
    predicted.push_back(
        argmax_first(clf.classify(connective, r.arg1, r.arg2).dist.probs));
  }
  EvalReport rep =
      score_predictions(predicted, gold_labels(test, clf.labels()), clf.labels());
  rep.metadata["method"] =
      "most-common-connective(" + std::string(connective) + ")";
  rep.metadata["classifier"] = clf.id();
  return rep;
}

// Explicitates each relation with its gold implicit connective, multi-word
// connectives included.
inline EvalReport upper_bound_gold_connective(const std::vector<Relation>& test,
                                              const ExplicitClassifier& clf) {
  std::vector<size_t> predicted;
  predicted.reserve(test.size());
  for (const Relation& r : test) {
    predicted.push_back(
        argmax_first(clf.classify(r.connective, r.arg1, r.arg2).dist.probs));
  }
  EvalReport rep =
      score_predictions(predicted, gold_labels(test, clf.labels()), clf.labels());
  rep.metadata["method"] = "gold-connective";
  rep.metadata["classifier"] = clf.id();
  return rep;
}

// ---------------------------------------------------------------------------
// Agreement with annotator-inserted connectives.

struct AgreementReport {
  size_t test_size = 0;
  size_t eligible = 0;  // relations with a one-word gold connective
  size_t connective_matches = 0;
  size_t sense_matches = 0;

  double connective_percent() const {
    return eligible == 0 ? 0.0 : 100.0 * connective_matches / eligible;
  }
  double sense_percent() const {
    return eligible == 0 ? 0.0 : 100.0 * sense_matches / eligible;
  }
};

inline bool is_one_word_connective(std::string_view connective) {
  const std::string_view t = trim_view(connective);
  return !t.empty() && !has_whitespace(t);
}

// Connective agreement: top-ranked connective equals the gold one
// (case-insensitive). Sense agreement: the most frequent sense of the
// top-ranked connective matches a gold label.
inline AgreementReport agreement(
    const std::vector<Relation>& test,
    const std::vector<ConnectiveDistribution>& dists,
    const ConnectiveInventory& inv, const ExplicitClassifier& clf) {
  if (dists.size() != test.size()) {
    throw DataError("agreement: distributions do not match the test set");
  }
  const std::vector<GoldLabels> golds = gold_labels(test, clf.labels());
  AgreementReport r;
  r.test_size = test.size();
  for (size_t i = 0; i < test.size(); ++i) {
    if (!is_one_word_connective(test[i].connective)) continue;
    ++r.eligible;
    if (dists[i].size() != inv.size()) {
      throw DataError("agreement: distribution does not match the inventory");
    }
    const std::string& top = inv[top_connective(dists[i])];
    if (connective_key(top) == connective_key(test[i].connective)) {
      ++r.connective_matches;
    }
    const size_t sense = most_frequent_sense(clf, top);
    if (std::find(golds[i].begin(), golds[i].end(), sense) != golds[i].end()) {
      ++r.sense_matches;
    }
  }
  return r;
}

// Counts of (predicted top connective, gold connective) restricted to the
// `top_k` most frequent gold connectives of the test set.
struct ConnectiveConfusion {
  std::vector<std::string> gold;       // columns, most frequent first
  std::vector<std::string> predicted;  // rows, inventory order
  std::vector<std::vector<size_t>> counts;  // counts[row][col]
};

inline ConnectiveConfusion connective_confusion(
    const std::vector<Relation>& test,
    const std::vector<ConnectiveDistribution>& dists,
    const ConnectiveInventory& inv, size_t top_k) {
  if (top_k == 0) throw ConfigError("confusion: top_k must be >= 1");
  if (dists.size() != test.size()) {
    throw DataError("confusion: distributions do not match the test set");
  }
  std::map<std::string, size_t> gold_freq;
  for (const Relation& r : test) ++gold_freq[connective_key(r.connective)];
  std::vector<std::pair<std::string, size_t>> ranked(gold_freq.begin(),
                                                     gold_freq.end());
  // Ties broken alphabetically; std::map iteration already is.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > top_k) ranked.resize(top_k);

  ConnectiveConfusion out;
  std::map<std::string, size_t> column;
  for (const auto& [conn, count] : ranked) {
    column[conn] = out.gold.size();
    out.gold.push_back(conn);
  }
  std::vector<std::vector<size_t>> by_inventory(
      inv.size(), std::vector<size_t>(out.gold.size(), 0));
  for (size_t i = 0; i < test.size(); ++i) {
    auto col = column.find(connective_key(test[i].connective));
    if (col == column.end()) continue;
    ++by_inventory[top_connective(dists[i])][col->second];
  }
  for (size_t c = 0; c < inv.size(); ++c) {
    size_t row_total = 0;
    for (size_t v : by_inventory[c]) row_total += v;
    if (row_total == 0) continue;
    out.predicted.push_back(inv[c]);
    out.counts.push_back(std::move(by_inventory[c]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Repeated runs.

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

struct RunAggregate {
  LabelSet labels;
  size_t runs = 0;
  std::vector<MeanStd> f1;
  MeanStd macro_f1;
  MeanStd accuracy;
};

inline RunAggregate aggregate_runs(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw DataError("aggregate: no runs");
  RunAggregate a;
  a.labels = reports.front().labels;
  a.runs = reports.size();
  for (size_t c = 0; c < a.labels.size(); ++c) {
    std::vector<double> xs;
    for (const auto& r : reports) xs.push_back(r.f1.at(c));
    a.f1.push_back(mean_std(xs));
  }
  std::vector<double> macro, acc;
  for (const auto& r : reports) {
    macro.push_back(r.macro_f1);
    acc.push_back(r.accuracy);
  }
  a.macro_f1 = mean_std(macro);
  a.accuracy = mean_std(acc);
  return a;
}

}  // namespace discex

#endif  // DISCEX_EVALUATION_HPP_
