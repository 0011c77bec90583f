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

// Connective scoring backends and the estimate of P(connective | args).

#ifndef DISCEX_SCORING_HPP_
#define DISCEX_SCORING_HPP_

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "discex/candidates.hpp"
#include "discex/distribution.hpp"
#include "discex/errors.hpp"
#include "discex/ngram.hpp"
#include "discex/sidecar.hpp"
#include "discex/text.hpp"

namespace discex {

// A language model behind the connective scorer. Implementations are
// immutable after construction and safe to call concurrently.
class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;
  virtual std::string id() const = 0;
  virtual bool supports(ScoringMode mode) const = 0;
  // One natural-log score per connective, in inventory order.
  virtual std::vector<double> score_candidates(
      const CandidateSet& cands) const = 0;
};

struct ScoreOptions {
  // Divide causal log-likelihoods by candidate token count. Off by default:
  // raw joint likelihoods are normalized over connectives as they are.
  bool length_penalty = false;
};

inline LogScoreVector score(const ScoringBackend& backend,
                            const CandidateSet& cands,
                            const ScoreOptions& opts = {}) {
  if (!backend.supports(cands.mode)) {
    throw BackendError("backend '" + backend.id() + "' does not support " +
                       std::string(mode_name(cands.mode)) + " mode");
  }
  LogScoreVector out;
  out.mode = cands.mode;
  out.scores = backend.score_candidates(cands);
  if (out.scores.size() != cands.size()) {
    throw BackendError("backend '" + backend.id() + "' returned " +
                       std::to_string(out.scores.size()) + " scores for " +
                       std::to_string(cands.size()) + " connectives");
  }
  for (size_t i = 0; i < out.scores.size(); ++i) {
    if (!std::isfinite(out.scores[i])) {
      throw BackendError("backend '" + backend.id() +
                         "' returned a non-finite score for connective '" +
                         (*cands.inventory)[i] + "'");
    }
  }
  if (opts.length_penalty && cands.mode == ScoringMode::kCausal) {
    for (size_t i = 0; i < out.scores.size(); ++i) {
      const size_t n = tokenize(cands.texts[i]).size();
      if (n > 0) out.scores[i] /= static_cast<double>(n);
    }
  }
  return out;
}

// Every connective scores the same.
class UniformBackend : public ScoringBackend {
 public:
  std::string id() const override { return "uniform"; }
  bool supports(ScoringMode) const override { return true; }
  std::vector<double> score_candidates(
      const CandidateSet& cands) const override {
    return std::vector<double>(cands.size(), 0.0);
  }
};

// Joint log-likelihood of each joined candidate under an n-gram model.
class NGramBackend : public ScoringBackend {
 public:
  explicit NGramBackend(std::shared_ptr<const NGramModel> model)
      : model_(std::move(model)) {}

  std::string id() const override {
    return "ngram(order=" + std::to_string(model_->order()) + ")";
  }
  bool supports(ScoringMode mode) const override {
    return mode == ScoringMode::kCausal;
  }
  std::vector<double> score_candidates(
      const CandidateSet& cands) const override {
    std::vector<double> out;
    out.reserve(cands.texts.size());
    for (const std::string& text : cands.texts) {
      out.push_back(model_->sequence_log_prob(text));
    }
    return out;
  }

  const NGramModel& model() const { return *model_; }

 private:
  std::shared_ptr<const NGramModel> model_;
};

// Precomputed scores keyed by the relation's argument texts. Fixture format,
// one JSON object per line:
//
//   {"arg1": "...", "arg2": "...", "mode": "causal",
//    "log_scores": {"and": -1.5, "but": -2.0, ...}}
//
// "mode" is optional; an entry without it serves both modes.
class TableBackend : public ScoringBackend {
 public:
  static TableBackend parse(std::string_view jsonl) {
    TableBackend t;
    size_t line_no = 0;
    for (const std::string& line : split(jsonl, '\n')) {
      ++line_no;
      if (trim_view(line).empty()) continue;
      try {
        const nlohmann::json j = nlohmann::json::parse(line);
        std::string mode = "*";
        if (j.contains("mode")) {
          mode = std::string(mode_name(parse_mode(j["mode"].get<std::string>())));
        }
        std::map<std::string, double> scores;
        for (const auto& [conn, value] : j.at("log_scores").items()) {
          scores[to_lower(conn)] = value.get<double>();
        }
        const std::string k =
            key(j.at("arg1").get<std::string>(), j.at("arg2").get<std::string>(),
                mode);
        if (!t.entries_.emplace(k, std::move(scores)).second) {
          throw DataError("duplicate table entry");
        }
      } catch (const nlohmann::json::exception& e) {
        throw DataError("score table line " + std::to_string(line_no) + ": " +
                        e.what());
      } catch (const DataError& e) {
        throw DataError("score table line " + std::to_string(line_no) + ": " +
                        e.what());
      }
    }
    return t;
  }

  std::string id() const override { return "table"; }
  bool supports(ScoringMode) const override { return true; }

  std::vector<double> score_candidates(
      const CandidateSet& cands) const override {
    auto it = entries_.find(
        key(cands.arg1, cands.arg2, std::string(mode_name(cands.mode))));
    if (it == entries_.end()) it = entries_.find(key(cands.arg1, cands.arg2, "*"));
    if (it == entries_.end()) {
      throw BackendError("score table has no entry for arg1 '" +
                         trim(cands.arg1).substr(0, 40) + "...'");
    }
    std::vector<double> out;
    out.reserve(cands.size());
    for (const std::string& c : cands.inventory->connectives()) {
      auto s = it->second.find(to_lower(c));
      if (s == it->second.end()) {
        throw BackendError("score table entry lacks connective '" + c + "'");
      }
      out.push_back(s->second);
    }
    return out;
  }

  size_t size() const { return entries_.size(); }

 private:
  static std::string key(std::string_view arg1, std::string_view arg2,
                         const std::string& mode) {
    return trim(arg1) + '\x1f' + trim(arg2) + '\x1f' + mode;
  }

  std::map<std::string, std::map<std::string, double>> entries_;
};

// Delegates to the external language-model sidecar. Raw arguments are sent;
// the sidecar applies the same joining and casing rules as the core.
class SidecarBackend : public ScoringBackend {
 public:
  SidecarBackend(std::shared_ptr<SidecarClient> client, std::string endpoint)
      : client_(std::move(client)), endpoint_(std::move(endpoint)) {}

  std::string id() const override { return "sidecar(" + endpoint_ + ")"; }
  bool supports(ScoringMode) const override { return true; }

  std::vector<double> score_candidates(
      const CandidateSet& cands) const override {
    nlohmann::json req;
    req["op"] = "score";
    req["mode"] = std::string(mode_name(cands.mode));
    req["parts"] = {cands.arg1, cands.arg2};
    req["connectives"] = cands.inventory->connectives();
    const nlohmann::json resp = client_->call(std::move(req));
    try {
      return resp.at("log_scores").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("sidecar score response: ") + e.what());
    }
  }

 private:
  std::shared_ptr<SidecarClient> client_;
  std::string endpoint_;
};

// Scores a relation's candidates and normalizes over the inventory.
inline ConnectiveDistribution connective_distribution(
    const ScoringBackend& backend, const CandidateSet& cands,
    const ScoreOptions& opts = {}) {
  return normalize(score(backend, cands, opts));
}

}  // namespace discex

#endif  // DISCEX_SCORING_HPP_
