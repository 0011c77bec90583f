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

// Explicit relation classifiers: P(sense | connective, arg1, arg2).
//
// The in-repo model is a smoothed connective -> sense frequency table
// trained on explicit relations. It ignores the argument texts; explicit
// relations are largely disambiguated by their connective alone. A
// fine-tuned sentence-pair classifier can be plugged in through the
// sidecar behind the same interface.

#ifndef DISCEX_CLASSIFIER_HPP_
#define DISCEX_CLASSIFIER_HPP_

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "discex/distribution.hpp"
#include "discex/errors.hpp"
#include "discex/relation.hpp"
#include "discex/sense.hpp"
#include "discex/sidecar.hpp"
#include "discex/text.hpp"

namespace discex {

// Probabilities aligned with a LabelSet.
struct SenseDistribution {
  std::vector<double> probs;

  size_t size() const { return probs.size(); }
  double operator[](size_t i) const { return probs[i]; }
};

// Tolerance applied when validating distributions received from outside.
inline constexpr double kExternalSumTolerance = 1e-6;

// Lookup key for connectives: lowercased and trimmed.
inline std::string connective_key(std::string_view connective) {
  return to_lower(trim_view(connective));
}

struct ClassifierOutput {
  SenseDistribution dist;
  // Set when the connective was unseen and the global prior was returned.
  bool used_prior = false;
};

class ExplicitClassifier {
 public:
  virtual ~ExplicitClassifier() = default;
  virtual std::string id() const = 0;
  virtual const LabelSet& labels() const = 0;
  virtual ClassifierOutput classify(std::string_view connective,
                                    std::string_view arg1,
                                    std::string_view arg2) const = 0;
};

struct FrequencyTrainStats {
  size_t relations_used = 0;
  size_t relations_dropped = 0;  // no sense at the level, or not explicit
  size_t pairs = 0;              // (relation, distinct label) pairs
};

class FrequencyModel {
 public:
  int level() const { return labels_.level(); }
  const LabelSet& labels() const { return labels_; }
  double k() const { return k_; }
  const std::map<std::string, std::vector<double>>& rows() const {
    return rows_;
  }
  const std::vector<double>& prior() const { return prior_; }
  const std::string& fingerprint() const { return fingerprint_; }
  // Raw training counts; empty for models loaded from JSON.
  const std::map<std::string, std::vector<size_t>>& counts() const {
    return counts_;
  }
  const FrequencyTrainStats& train_stats() const { return stats_; }

  // row(C)[l] = (count(C, l) + k) / (count(C) + k |labels|), and the prior
  // is the same estimate over all connectives pooled.
  static FrequencyModel train(const std::vector<Relation>& train,
                              const LabelSet& labels, double k) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
      throw ConfigError("classifier smoothing k must be >= 0");
    }
    FrequencyModel m;
    m.labels_ = labels;
    m.k_ = k;
    const size_t n = labels.size();
    std::vector<size_t> totals(n, 0);
    for (const Relation& r : train) {
      const std::vector<size_t> ls = labels.labels_of(r.senses);
      if (!r.is_explicit() || ls.empty()) {
        ++m.stats_.relations_dropped;
        continue;
      }
      ++m.stats_.relations_used;
      auto& row = m.counts_[connective_key(r.connective)];
      row.resize(n, 0);
      for (size_t l : ls) {
        ++row[l];
        ++totals[l];
        ++m.stats_.pairs;
      }
    }
    if (m.stats_.pairs == 0) {
      throw DataError("classifier training set is empty at level " +
                      std::to_string(labels.level()));
    }
    for (const auto& [conn, row] : m.counts_) {
      m.rows_[conn] = smooth(row, k);
    }
    m.prior_ = smooth(totals, k);
    m.fingerprint_ = m.compute_fingerprint();
    return m;
  }

  ClassifierOutput predict(std::string_view connective) const {
    ClassifierOutput out;
    if (auto it = rows_.find(connective_key(connective)); it != rows_.end()) {
      out.dist.probs = it->second;
    } else {
      out.dist.probs = prior_;
      out.used_prior = true;
    }
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["level"] = level();
    j["labels"] = labels_.names();
    j["k"] = k_;
    nlohmann::ordered_json rows = nlohmann::ordered_json::object();
    for (const auto& [conn, row] : rows_) rows[conn] = row;
    j["rows"] = std::move(rows);
    j["prior"] = prior_;
    j["fingerprint"] = fingerprint_;
    return j;
  }

  static FrequencyModel from_json(const nlohmann::json& j) {
    try {
      FrequencyModel m;
      m.labels_ = LabelSet(j.at("level").get<int>(),
                           j.at("labels").get<std::vector<std::string>>());
      m.k_ = j.at("k").get<double>();
      const size_t n = m.labels_.size();
      for (const auto& [conn, row] : j.at("rows").items()) {
        auto probs = row.get<std::vector<double>>();
        validate_distribution(probs, n, 1e-9, "model row '" + conn + "'");
        m.rows_[conn] = std::move(probs);
      }
      m.prior_ = j.at("prior").get<std::vector<double>>();
      validate_distribution(m.prior_, n, 1e-9, "model prior");
      m.fingerprint_ = j.at("fingerprint").get<std::string>();
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("classifier model JSON: ") + e.what());
    } catch (const BackendError& e) {
      throw DataError(std::string("classifier model JSON: ") + e.what());
    }
  }

 private:
  static std::vector<double> smooth(const std::vector<size_t>& counts,
                                    double k) {
    double total = 0.0;
    for (size_t c : counts) total += static_cast<double>(c);
    const double denom = total + k * static_cast<double>(counts.size());
    std::vector<double> out;
    out.reserve(counts.size());
    for (size_t c : counts) out.push_back((static_cast<double>(c) + k) / denom);
    return out;
  }

  // Depends only on the counts, so it is independent of training order.
  std::string compute_fingerprint() const {
    Fingerprint fp;
    fp.update(std::to_string(level()));
    for (const auto& name : labels_.names()) fp.update(name);
    char kbuf[32];
    std::snprintf(kbuf, sizeof(kbuf), "%.17g", k_);
    fp.update(kbuf);
    for (const auto& [conn, row] : counts_) {
      fp.update(conn);
      for (size_t c : row) fp.update(std::to_string(c));
    }
    return fp.hex();
  }

  LabelSet labels_;
  double k_ = 1.0;
  std::map<std::string, std::vector<size_t>> counts_;
  std::map<std::string, std::vector<double>> rows_;
  std::vector<double> prior_;
  std::string fingerprint_;
  FrequencyTrainStats stats_;
};

inline FrequencyModel train_frequency(const std::vector<Relation>& train,
                                      const LabelSet& labels, double k = 1.0) {
  return FrequencyModel::train(train, labels, k);
}

// The frequency classifier ignores the argument texts.
inline ClassifierOutput predict(const FrequencyModel& model,
                                std::string_view connective,
                                std::string_view /*arg1*/ = {},
                                std::string_view /*arg2*/ = {}) {
  return model.predict(connective);
}

class FrequencyClassifier : public ExplicitClassifier {
 public:
  explicit FrequencyClassifier(FrequencyModel model)
      : model_(std::move(model)) {}

  std::string id() const override {
    return "frequency(k=" + nlohmann::json(model_.k()).dump() +
           ",fingerprint=" + model_.fingerprint() + ")";
  }
  const LabelSet& labels() const override { return model_.labels(); }
  ClassifierOutput classify(std::string_view connective, std::string_view,
                            std::string_view) const override {
    return model_.predict(connective);
  }

  const FrequencyModel& model() const { return model_; }

 private:
  FrequencyModel model_;
};

// Argmax of the classifier's distribution for `connective`; ties go to the
// earlier label.
inline size_t most_frequent_sense(const ExplicitClassifier& clf,
                                  std::string_view connective) {
  return argmax_first(clf.classify(connective, {}, {}).dist.probs);
}

inline size_t most_frequent_sense(const FrequencyModel& model,
                                  std::string_view connective) {
  return argmax_first(model.predict(connective).dist.probs);
}

// Asks the sidecar's fine-tuned classifier. The returned distribution is
// validated and never renormalized.
inline SenseDistribution external_predict(SidecarClient& client,
                                          std::string_view connective,
                                          std::string_view arg1,
                                          std::string_view arg2,
                                          const LabelSet& labels) {
  nlohmann::json req;
  req["op"] = "classify";
  req["connective"] = std::string(connective);
  req["arg1"] = std::string(arg1);
  req["arg2"] = std::string(arg2);
  req["level"] = labels.level();
  const nlohmann::json resp = client.call(std::move(req));
  SenseDistribution out;
  try {
    out.probs = resp.at("probs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("sidecar classify response: ") + e.what());
  }
  validate_distribution(out.probs, labels.size(), kExternalSumTolerance,
                        "sidecar classify response");
  return out;
}

class SidecarClassifier : public ExplicitClassifier {
 public:
  SidecarClassifier(std::shared_ptr<SidecarClient> client, LabelSet labels,
                    std::string endpoint)
      : client_(std::move(client)),
        labels_(std::move(labels)),
        endpoint_(std::move(endpoint)) {}

  std::string id() const override { return "sidecar(" + endpoint_ + ")"; }
  const LabelSet& labels() const override { return labels_; }
  ClassifierOutput classify(std::string_view connective, std::string_view arg1,
                            std::string_view arg2) const override {
    ClassifierOutput out;
    out.dist = external_predict(*client_, connective, arg1, arg2, labels_);
    return out;
  }

 private:
  std::shared_ptr<SidecarClient> client_;
  LabelSet labels_;
  std::string endpoint_;
};

}  // namespace discex

#endif  // DISCEX_CLASSIFIER_HPP_
