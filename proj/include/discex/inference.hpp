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

// Final sense prediction from a connective distribution and an explicit
// classifier, by two rules:
//
//   pipeline:  P(l | A1, A2) = P_exp(l | argmax_C P_conn(C | A1, A2), A1, A2)
//   marginal:  P(l | A1, A2) = sum_C P_exp(l | C, A1, A2) P_conn(C | A1, A2)

#ifndef DISCEX_INFERENCE_HPP_
#define DISCEX_INFERENCE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "discex/candidates.hpp"
#include "discex/classifier.hpp"
#include "discex/distribution.hpp"
#include "discex/errors.hpp"
#include "discex/sense.hpp"

namespace discex {

enum class InferenceMethod { kPipeline, kMarginal };

inline std::string_view method_name(InferenceMethod m) {
  return m == InferenceMethod::kPipeline ? "pipeline" : "marginal";
}

struct Prediction {
  size_t relation_id = 0;
  InferenceMethod method = InferenceMethod::kPipeline;
  size_t label = 0;  // argmax of `probs`, earliest label on ties
  SenseDistribution probs;
  size_t top_connective = 0;
  ConnectiveDistribution connectives;
  // Some classifier lookup fell back to the global prior.
  bool used_prior = false;
};

namespace internal {

inline void check_inputs(const ConnectiveDistribution& dist,
                         const ConnectiveInventory& inv) {
  if (dist.size() != inv.size() || dist.size() == 0) {
    throw DataError("connective distribution does not match the inventory");
  }
}

}  // namespace internal

inline Prediction pipeline_predict(const ConnectiveDistribution& dist,
                                   const ConnectiveInventory& inv,
                                   const ExplicitClassifier& clf,
                                   std::string_view arg1,
                                   std::string_view arg2) {
  internal::check_inputs(dist, inv);
  Prediction p;
  p.method = InferenceMethod::kPipeline;
  p.top_connective = top_connective(dist);
  ClassifierOutput out = clf.classify(inv[p.top_connective], arg1, arg2);
  p.probs = std::move(out.dist);
  p.used_prior = out.used_prior;
  p.label = argmax_first(p.probs.probs);
  p.connectives = dist;
  return p;
}

inline Prediction marginal_predict(const ConnectiveDistribution& dist,
                                   const ConnectiveInventory& inv,
                                   const ExplicitClassifier& clf,
                                   std::string_view arg1,
                                   std::string_view arg2) {
  internal::check_inputs(dist, inv);
  Prediction p;
  p.method = InferenceMethod::kMarginal;
  p.top_connective = top_connective(dist);
  p.probs.probs.assign(clf.labels().size(), 0.0);
  for (size_t c = 0; c < inv.size(); ++c) {
    const ClassifierOutput out = clf.classify(inv[c], arg1, arg2);
    if (out.dist.size() != p.probs.size()) {
      throw BackendError("classifier returned a distribution of wrong size");
    }
    p.used_prior = p.used_prior || out.used_prior;
    const double w = dist[c];
    for (size_t l = 0; l < p.probs.size(); ++l) {
      p.probs.probs[l] += w * out.dist[l];
    }
  }
  p.label = argmax_first(p.probs.probs);
  p.connectives = dist;
  return p;
}

inline Prediction predict_with(InferenceMethod method,
                               const ConnectiveDistribution& dist,
                               const ConnectiveInventory& inv,
                               const ExplicitClassifier& clf,
                               std::string_view arg1, std::string_view arg2) {
  return method == InferenceMethod::kPipeline
             ? pipeline_predict(dist, inv, clf, arg1, arg2)
             : marginal_predict(dist, inv, clf, arg1, arg2);
}

// Transitions between pipeline and marginal labels over the same relations.
struct LabelShiftReport {
  LabelSet labels;
  // matrix[from][to]: pipeline label -> marginal label.
  std::vector<std::vector<size_t>> matrix;
  size_t total = 0;
  size_t changed = 0;

  double changed_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(changed) / total;
  }
};

inline LabelShiftReport label_shift_report(
    const std::vector<Prediction>& pipeline,
    const std::vector<Prediction>& marginal, const LabelSet& labels) {
  if (pipeline.size() != marginal.size()) {
    throw DataError("shift report: prediction lists differ in length");
  }
  LabelShiftReport r;
  r.labels = labels;
  r.matrix.assign(labels.size(), std::vector<size_t>(labels.size(), 0));
  for (size_t i = 0; i < pipeline.size(); ++i) {
    if (pipeline[i].relation_id != marginal[i].relation_id) {
      throw DataError("shift report: prediction lists are not aligned");
    }
    const size_t from = pipeline[i].label;
    const size_t to = marginal[i].label;
    if (from >= labels.size() || to >= labels.size()) {
      throw DataError("shift report: label index out of range");
    }
    ++r.matrix[from][to];
    ++r.total;
    if (from != to) ++r.changed;
  }
  return r;
}

}  // namespace discex

#endif  // DISCEX_INFERENCE_HPP_
