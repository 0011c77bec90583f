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

// Log-space connective scores and the normalized connective distribution.

#ifndef DISCEX_DISTRIBUTION_HPP_
#define DISCEX_DISTRIBUTION_HPP_

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "discex/candidates.hpp"
#include "discex/errors.hpp"

namespace discex {

// Unnormalized natural-log scores, aligned with the inventory.
struct LogScoreVector {
  ScoringMode mode = ScoringMode::kCausal;
  std::vector<double> scores;

  size_t size() const { return scores.size(); }
};

// Probabilities over the inventory. Sums to one.
struct ConnectiveDistribution {
  std::vector<double> probs;

  size_t size() const { return probs.size(); }
  double operator[](size_t i) const { return probs[i]; }
};

// Index of the largest value; earliest index wins ties.
inline size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw DataError("argmax of an empty vector");
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw DataError("log-sum-exp of an empty vector");
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : values) mx = std::max(mx, v);
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

inline ConnectiveDistribution normalize(const LogScoreVector& scores) {
  for (double s : scores.scores) {
    if (!std::isfinite(s)) throw DataError("normalize: non-finite log-score");
  }
  const double lse = log_sum_exp(scores.scores);
  ConnectiveDistribution out;
  out.probs.reserve(scores.size());
  for (double s : scores.scores) out.probs.push_back(std::exp(s - lse));
  return out;
}

// Most probable connective index; ties go to the earlier inventory entry.
inline size_t top_connective(const ConnectiveDistribution& dist) {
  return argmax_first(dist.probs);
}

// Checks length, non-negativity and unit mass.
inline void validate_distribution(std::span<const double> probs,
                                  size_t expected_size, double tolerance,
                                  const std::string& what) {
  if (probs.size() != expected_size) {
    throw BackendError(what + ": expected " + std::to_string(expected_size) +
                       " probabilities, got " + std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw BackendError(what + ": negative or non-finite probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw BackendError(what + ": probabilities sum to " + std::to_string(sum));
  }
}

}  // namespace discex

#endif  // DISCEX_DISTRIBUTION_HPP_
