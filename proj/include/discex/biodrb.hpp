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

// Mapping of BioDRB sense labels onto the PDTB 2.0 hierarchy.
//
// The table is a plain-text file of `source = target` lines. Labels that
// are not in the table but already name a valid PDTB 2.0 path map to
// themselves. Anything else is reported as unmapped; nothing is guessed.

#ifndef DISCEX_BIODRB_HPP_
#define DISCEX_BIODRB_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "discex/errors.hpp"
#include "discex/sense.hpp"
#include "discex/text.hpp"

namespace discex {

struct SenseMapResult {
  std::string raw;
  std::optional<SensePath> path;  // empty when unmapped

  bool mapped() const { return path.has_value(); }
};

// Counts of unmapped source labels, keyed by label.
using UnmappedReport = std::map<std::string, size_t>;

class SenseMapping {
 public:
  SenseMapping() = default;

  static SenseMapping parse(std::string_view text) {
    SenseMapping m;
    for (const std::string& line : config_lines(text)) {
      const size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("sense map: expected 'source = target', got '" +
                          line + "'");
      }
      std::string source = trim(line.substr(0, eq));
      std::string target = trim(line.substr(eq + 1));
      if (source.empty() || target.empty()) {
        throw ConfigError("sense map: empty side in '" + line + "'");
      }
      if (!parse_sense_path(target)) {
        throw ConfigError("sense map: target '" + target +
                          "' is not a PDTB 2.0 sense");
      }
      if (!m.table_.emplace(std::move(source), std::move(target)).second) {
        throw ConfigError("sense map: duplicate source in '" + line + "'");
      }
    }
    return m;
  }

  const std::map<std::string, std::string, std::less<>>& table() const {
    return table_;
  }

  // `raw` is kept verbatim in the result so the original annotation can be
  // reconstructed.
  SenseMapResult map(std::string_view raw) const {
    SenseMapResult result;
    result.raw = std::string(raw);
    const std::string key = trim(raw);
    if (auto it = table_.find(key); it != table_.end()) {
      result.path = parse_sense_path(it->second);
    } else {
      result.path = parse_sense_path(key);
    }
    if (result.path) result.path->raw = result.raw;
    return result;
  }

 private:
  std::map<std::string, std::string, std::less<>> table_;
};

inline SenseMapResult map_biodrb_sense(const SenseMapping& mapping,
                                       std::string_view raw,
                                       UnmappedReport* report = nullptr) {
  SenseMapResult r = mapping.map(raw);
  if (!r.mapped() && report != nullptr) ++(*report)[trim(raw)];
  return r;
}

}  // namespace discex

#endif  // DISCEX_BIODRB_HPP_
