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

// Column layout of `|`-separated discourse annotation records.
//
// The layout is configuration: each corpus release ships a columns file of
// `key = index` lines. Indices are zero-based field positions.
//
//   fields               number of fields per record (required)
//   type                 relation type (required)
//   sense1, sense2       sense annotations (sense1 required)
//   section, file        document provenance
//   connective_head      explicit connective head
//   implicit_connective  annotator-inserted connective of implicit relations
//   arg1, arg2           argument texts
//   connective_span, arg1_span, arg2_span   character offsets
//
// When an argument or connective text column is absent its text is cut out
// of the document's raw text using the matching span column.

#ifndef DISCEX_COLUMNS_HPP_
#define DISCEX_COLUMNS_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "discex/errors.hpp"
#include "discex/text.hpp"

namespace discex {

struct ColumnMap {
  using Index = std::optional<size_t>;

  size_t field_count = 0;
  size_t type = 0;
  Index section;
  Index file;
  Index connective_head;
  Index implicit_connective;
  size_t sense1 = 0;
  Index sense2;
  Index arg1;
  Index arg2;
  Index connective_span;
  Index arg1_span;
  Index arg2_span;

  // The 48-field PDTB 2.0 pipe layout.
  static ColumnMap pdtb2() {
    ColumnMap m;
    m.field_count = 48;
    m.type = 0;
    m.section = 1;
    m.file = 2;
    m.connective_span = 3;
    m.connective_head = 8;
    m.implicit_connective = 9;
    m.sense1 = 11;
    m.sense2 = 12;
    m.arg1_span = 22;
    m.arg1 = 24;
    m.arg2_span = 32;
    m.arg2 = 34;
    return m;
  }

  // Named (key, index) pairs of every configured column.
  std::vector<std::pair<std::string, size_t>> entries() const {
    std::vector<std::pair<std::string, size_t>> out;
    out.emplace_back("type", type);
    out.emplace_back("sense1", sense1);
    auto add = [&out](const char* key, const Index& idx) {
      if (idx) out.emplace_back(key, *idx);
    };
    add("section", section);
    add("file", file);
    add("connective_head", connective_head);
    add("implicit_connective", implicit_connective);
    add("sense2", sense2);
    add("arg1", arg1);
    add("arg2", arg2);
    add("connective_span", connective_span);
    add("arg1_span", arg1_span);
    add("arg2_span", arg2_span);
    return out;
  }

  void validate() const {
    if (field_count == 0) throw ConfigError("columns: fields must be > 0");
    std::map<size_t, std::string> seen;
    for (const auto& [key, idx] : entries()) {
      if (idx >= field_count) {
        throw ConfigError("columns: " + key + " = " + std::to_string(idx) +
                          " is out of range for " +
                          std::to_string(field_count) + " fields");
      }
      auto [it, inserted] = seen.emplace(idx, key);
      if (!inserted) {
        throw ConfigError("columns: " + key + " and " + it->second +
                          " share index " + std::to_string(idx));
      }
    }
    if (!arg1 && !arg1_span) {
      throw ConfigError("columns: need arg1 or arg1_span");
    }
    if (!arg2 && !arg2_span) {
      throw ConfigError("columns: need arg2 or arg2_span");
    }
  }

  // True when some text must be recovered from raw document text.
  bool needs_raw_text() const { return !arg1 || !arg2; }

  static ColumnMap parse(std::string_view text) {
    ColumnMap m;
    bool have_fields = false, have_type = false, have_sense1 = false;
    std::map<std::string, Index*, std::less<>> optional_keys = {
        {"section", &m.section},
        {"file", &m.file},
        {"connective_head", &m.connective_head},
        {"implicit_connective", &m.implicit_connective},
        {"sense2", &m.sense2},
        {"arg1", &m.arg1},
        {"arg2", &m.arg2},
        {"connective_span", &m.connective_span},
        {"arg1_span", &m.arg1_span},
        {"arg2_span", &m.arg2_span},
    };
    for (const std::string& line : config_lines(text)) {
      const size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("columns: expected 'key = index', got '" + line +
                          "'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      size_t idx = 0;
      try {
        size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size() || v < 0) throw std::invalid_argument(value);
        idx = static_cast<size_t>(v);
      } catch (const std::logic_error&) {
        throw ConfigError("columns: bad index for " + key + ": '" + value +
                          "'");
      }
      if (key == "fields") {
        m.field_count = idx;
        have_fields = true;
      } else if (key == "type") {
        m.type = idx;
        have_type = true;
      } else if (key == "sense1") {
        m.sense1 = idx;
        have_sense1 = true;
      } else if (auto it = optional_keys.find(key); it != optional_keys.end()) {
        *it->second = idx;
      } else {
        throw ConfigError("columns: unknown key '" + key + "'");
      }
    }
    if (!have_fields || !have_type || !have_sense1) {
      throw ConfigError("columns: fields, type and sense1 are required");
    }
    m.validate();
    return m;
  }
};

}  // namespace discex

#endif  // DISCEX_COLUMNS_HPP_
