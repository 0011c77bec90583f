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

// PDTB 2.0 sense hierarchy, sense paths and evaluation label sets.

#ifndef DISCEX_SENSE_HPP_
#define DISCEX_SENSE_HPP_

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "discex/errors.hpp"
#include "discex/text.hpp"

namespace discex {

enum class TopSense { kTemporal, kContingency, kComparison, kExpansion };

inline constexpr std::array<std::string_view, 4> kTopSenseNames = {
    "Temporal", "Contingency", "Comparison", "Expansion"};

inline std::string_view top_sense_name(TopSense s) {
  return kTopSenseNames[static_cast<size_t>(s)];
}

inline std::optional<TopSense> parse_top_sense(std::string_view name) {
  for (size_t i = 0; i < kTopSenseNames.size(); ++i) {
    if (kTopSenseNames[i] == name) return static_cast<TopSense>(i);
  }
  return std::nullopt;
}

// Second-level types of the PDTB 2.0 hierarchy, keyed by first level.
inline const std::vector<std::string>& second_level_types(TopSense top) {
  static const std::array<std::vector<std::string>, 4> kTypes = {{
      {"Asynchronous", "Synchrony"},
      {"Cause", "Pragmatic cause", "Condition", "Pragmatic condition"},
      {"Contrast", "Pragmatic contrast", "Concession",
       "Pragmatic concession"},
      {"Conjunction", "Instantiation", "Restatement", "Alternative",
       "Exception", "List"},
  }};
  return kTypes[static_cast<size_t>(top)];
}

inline bool is_second_level_of(TopSense top, std::string_view type) {
  const auto& types = second_level_types(top);
  return std::find(types.begin(), types.end(), type) != types.end();
}

// One sense annotation. `raw` keeps the annotation string exactly as it
// appeared in the source so it can be written back out.
struct SensePath {
  TopSense top = TopSense::kExpansion;
  std::optional<std::string> second;
  std::string raw;

  // "Expansion" or "Expansion.Conjunction"; empty optional when the path
  // has no second level and level 2 is requested.
  std::optional<std::string> label(int level) const {
    if (level == 1) return std::string(top_sense_name(top));
    if (level == 2 && second) {
      return std::string(top_sense_name(top)) + "." + *second;
    }
    return std::nullopt;
  }

  bool operator==(const SensePath&) const = default;
};

// Parses a dotted hierarchy path ("Contingency.Cause.Reason"). Third-level
// components are accepted but not retained beyond `raw`.
inline std::optional<SensePath> parse_sense_path(std::string_view raw) {
  const std::string trimmed = trim(raw);
  if (trimmed.empty()) return std::nullopt;
  const std::vector<std::string> parts = split(trimmed, '.');
  const auto top = parse_top_sense(parts[0]);
  if (!top) return std::nullopt;
  SensePath path;
  path.top = *top;
  path.raw = std::string(raw);
  if (parts.size() >= 2) {
    if (!is_second_level_of(*top, parts[1])) return std::nullopt;
    path.second = parts[1];
  }
  return path;
}

inline SensePath sense_path_or_throw(std::string_view raw) {
  auto path = parse_sense_path(raw);
  if (!path) {
    throw DataError("not a PDTB 2.0 sense: '" + std::string(raw) + "'");
  }
  return *path;
}

// Ordered evaluation labels at one hierarchy level. Order defines argmax
// tie-breaking and the row/column order of every report.
class LabelSet {
 public:
  LabelSet() = default;

  LabelSet(int level, std::vector<std::string> names)
      : level_(level), names_(std::move(names)) {
    if (level_ != 1 && level_ != 2) {
      throw ConfigError("label level must be 1 or 2");
    }
    if (names_.empty()) throw ConfigError("label set is empty");
    for (size_t i = 0; i < names_.size(); ++i) {
      const auto path = parse_sense_path(names_[i]);
      if (!path || path->label(level_) != names_[i]) {
        throw ConfigError("label '" + names_[i] +
                          "' is not a level-" + std::to_string(level_) +
                          " PDTB 2.0 sense");
      }
      if (!index_.emplace(names_[i], i).second) {
        throw ConfigError("duplicate label '" + names_[i] + "'");
      }
    }
  }

  static LabelSet first_level() {
    return LabelSet(1, {"Temporal", "Contingency", "Comparison", "Expansion"});
  }

  // The 11 second-level types of the standard 11-way setting.
  static LabelSet eleven_way() {
    return LabelSet(2, {"Temporal.Asynchronous", "Temporal.Synchrony",
                        "Contingency.Cause", "Contingency.Pragmatic cause",
                        "Comparison.Contrast", "Comparison.Concession",
                        "Expansion.Conjunction", "Expansion.Instantiation",
                        "Expansion.Restatement", "Expansion.Alternative",
                        "Expansion.List"});
  }

  static LabelSet parse(int level, std::string_view text) {
    return LabelSet(level, config_lines(text));
  }

  int level() const { return level_; }
  size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(size_t i) const { return names_.at(i); }

  std::optional<size_t> index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Distinct in-set label indices of `senses`, in annotation order.
  std::vector<size_t> labels_of(const std::vector<SensePath>& senses) const {
    std::vector<size_t> out;
    for (const SensePath& s : senses) {
      const auto label = s.label(level_);
      if (!label) continue;
      const auto idx = index_of(*label);
      if (!idx) continue;
      if (std::find(out.begin(), out.end(), *idx) == out.end()) {
        out.push_back(*idx);
      }
    }
    return out;
  }

  bool operator==(const LabelSet& other) const {
    return level_ == other.level_ && names_ == other.names_;
  }

 private:
  int level_ = 1;
  std::vector<std::string> names_;
  std::map<std::string, size_t, std::less<>> index_;
};

}  // namespace discex

#endif  // DISCEX_SENSE_HPP_
