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

// Shared discourse relation data model.

#ifndef DISCEX_RELATION_HPP_
#define DISCEX_RELATION_HPP_

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "discex/errors.hpp"
#include "discex/sense.hpp"
#include "discex/text.hpp"

namespace discex {

enum class RelationKind { kExplicit, kImplicit };

inline std::string_view kind_name(RelationKind k) {
  return k == RelationKind::kExplicit ? "Explicit" : "Implicit";
}

// Half-open character range [begin, end) into the source document.
struct CharSpan {
  long begin = 0;
  long end = 0;
  bool operator==(const CharSpan&) const = default;
};

// A possibly discontinuous span, e.g. "10..20;35..40". Empty means absent.
using SpanList = std::vector<CharSpan>;

inline long span_min(const SpanList& s) {
  long m = s.front().begin;
  for (const auto& r : s) m = std::min(m, r.begin);
  return m;
}

inline long span_max(const SpanList& s) {
  long m = s.front().end;
  for (const auto& r : s) m = std::max(m, r.end);
  return m;
}

// Parses "a..b" or "a..b;c..d". Throws DataError on malformed input.
inline SpanList parse_span_list(std::string_view text) {
  SpanList out;
  const std::string trimmed = trim(text);
  if (trimmed.empty()) return out;
  for (const std::string& piece : split(trimmed, ';')) {
    const size_t dots = piece.find("..");
    if (dots == std::string::npos) {
      throw DataError("malformed span '" + piece + "'");
    }
    try {
      size_t used = 0;
      const std::string b = trim(piece.substr(0, dots));
      const std::string e = trim(piece.substr(dots + 2));
      CharSpan span;
      span.begin = std::stol(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
      span.end = std::stol(e, &used);
      if (used != e.size()) throw std::invalid_argument(e);
      if (span.end < span.begin) throw std::invalid_argument(piece);
      out.push_back(span);
    } catch (const std::logic_error&) {
      throw DataError("malformed span '" + piece + "'");
    }
  }
  return out;
}

struct RelationSource {
  std::string corpus;
  int section = -1;  // -1 when the corpus has no sections
  std::string file;
  size_t line = 0;  // 1-based record line in the source file
};

struct Relation {
  RelationKind kind = RelationKind::kImplicit;
  // Explicit connective head, or the annotator-inserted implicit connective.
  std::string connective;
  std::string arg1;
  std::string arg2;
  std::vector<SensePath> senses;  // one or two entries
  RelationSource source;
  SpanList arg1_span;
  SpanList connective_span;
  SpanList arg2_span;

  bool is_explicit() const { return kind == RelationKind::kExplicit; }
  bool is_implicit() const { return kind == RelationKind::kImplicit; }
};

// Checks the invariants every parsed relation must satisfy.
inline void validate_relation(const Relation& r) {
  if (trim_view(r.arg1).empty()) throw DataError("empty arg1");
  if (trim_view(r.arg2).empty()) throw DataError("empty arg2");
  if (r.senses.empty() || r.senses.size() > 2) {
    throw DataError("relation must carry one or two senses");
  }
}

}  // namespace discex

#endif  // DISCEX_RELATION_HPP_
