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

// Connective inventory and explicitation candidates.
//
// A candidate joins the two arguments of an implicit relation with one
// connective from the inventory:
//
//   norm_arg1(arg1) + " " + connective + " " + norm_arg2(arg2)
//
// norm_arg1 drops trailing sentence-final punctuation (. ! ?) so the first
// argument reads as a clause; norm_arg2 lowercases the first letter of the
// second argument. Masked candidates use a template with separator and mask
// slots instead; the concrete special tokens belong to the scorer.

#ifndef DISCEX_CANDIDATES_HPP_
#define DISCEX_CANDIDATES_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "discex/errors.hpp"
#include "discex/relation.hpp"
#include "discex/text.hpp"

namespace discex {

// Ordered list of one-word connectives. Order is the tie-breaking order for
// every argmax over connectives.
class ConnectiveInventory {
 public:
  ConnectiveInventory() = default;

  explicit ConnectiveInventory(std::vector<std::string> connectives)
      : connectives_(std::move(connectives)) {
    if (connectives_.empty()) throw ConfigError("inventory: empty");
    for (size_t i = 0; i < connectives_.size(); ++i) {
      const std::string& c = connectives_[i];
      if (c.empty() || has_whitespace(c)) {
        throw ConfigError("inventory: '" + c + "' is not a single word");
      }
      if (!index_.emplace(to_lower(c), i).second) {
        throw ConfigError("inventory: duplicate connective '" + c + "'");
      }
    }
  }

  // One connective per line; `#` starts a comment.
  static ConnectiveInventory parse(std::string_view text) {
    std::vector<std::string> entries;
    for (std::string& line : config_lines(text)) entries.push_back(line);
    return ConnectiveInventory(std::move(entries));
  }

  size_t size() const { return connectives_.size(); }
  const std::string& operator[](size_t i) const { return connectives_[i]; }
  const std::vector<std::string>& connectives() const { return connectives_; }

  // Case-insensitive lookup.
  std::optional<size_t> index_of(std::string_view connective) const {
    auto it = index_.find(to_lower(trim_view(connective)));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> connectives_;
  std::map<std::string, size_t, std::less<>> index_;
};

inline bool is_terminal_mark(char c) { return c == '.' || c == '!' || c == '?'; }

// Trims and strips trailing sentence-final punctuation. Idempotent.
inline std::string norm_arg1(std::string_view arg1) {
  std::string_view s = trim_view(arg1);
  while (!s.empty() && (is_terminal_mark(s.back()) || is_space(s.back()))) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

// Trims and lowercases the first letter. A leading non-ASCII letter is left
// as is (no Unicode case mapping).
inline std::string norm_arg2(std::string_view arg2) {
  std::string s = trim(arg2);
  for (char& c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80) break;
    if (c >= 'A' && c <= 'Z') {
      c = static_cast<char>(c - 'A' + 'a');
      break;
    }
    if (c >= 'a' && c <= 'z') break;
  }
  return s;
}

enum class ScoringMode { kCausal, kMasked };

inline std::string_view mode_name(ScoringMode m) {
  return m == ScoringMode::kCausal ? "causal" : "masked";
}

inline ScoringMode parse_mode(std::string_view name) {
  if (name == "causal") return ScoringMode::kCausal;
  if (name == "masked") return ScoringMode::kMasked;
  throw ConfigError("unknown scoring mode '" + std::string(name) + "'");
}

struct TemplatePart {
  enum class Kind { kText, kSeparator, kMask };
  Kind kind = Kind::kText;
  std::string text;  // only for kText
};

struct CandidateSet {
  ScoringMode mode = ScoringMode::kCausal;
  // Raw arguments of the source relation; backends key lookups on them.
  std::string arg1;
  std::string arg2;
  const ConnectiveInventory* inventory = nullptr;
  // Causal: one joined string per connective, in inventory order.
  std::vector<std::string> texts;
  // Masked: arg1 [SEP] [MASK] arg2 [SEP].
  std::vector<TemplatePart> parts;

  size_t size() const { return inventory ? inventory->size() : 0; }
};

namespace internal {

inline void require_implicit(const Relation& rel) {
  if (!rel.is_implicit()) {
    throw DataError("candidates are generated for implicit relations only");
  }
}

}  // namespace internal

inline CandidateSet generate_causal(const Relation& rel,
                                    const ConnectiveInventory& inv) {
  internal::require_implicit(rel);
  const std::string a1 = norm_arg1(rel.arg1);
  const std::string a2 = norm_arg2(rel.arg2);
  if (a1.empty()) throw DataError("arg1 is empty after normalization");
  if (a2.empty()) throw DataError("arg2 is empty after normalization");
  CandidateSet set;
  set.mode = ScoringMode::kCausal;
  set.arg1 = rel.arg1;
  set.arg2 = rel.arg2;
  set.inventory = &inv;
  set.texts.reserve(inv.size());
  for (const std::string& c : inv.connectives()) {
    std::string text;
    text.reserve(a1.size() + c.size() + a2.size() + 2);
    text.append(a1).append(" ").append(c).append(" ").append(a2);
    set.texts.push_back(std::move(text));
  }
  return set;
}

inline CandidateSet generate_masked(const Relation& rel,
                                    const ConnectiveInventory& inv) {
  internal::require_implicit(rel);
  const std::string a1 = trim(rel.arg1);
  const std::string a2 = norm_arg2(rel.arg2);
  if (a1.empty()) throw DataError("arg1 is empty after normalization");
  if (a2.empty()) throw DataError("arg2 is empty after normalization");
  using Kind = TemplatePart::Kind;
  CandidateSet set;
  set.mode = ScoringMode::kMasked;
  set.arg1 = rel.arg1;
  set.arg2 = rel.arg2;
  set.inventory = &inv;
  set.parts = {{Kind::kText, a1},
               {Kind::kSeparator, {}},
               {Kind::kMask, {}},
               {Kind::kText, a2},
               {Kind::kSeparator, {}}};
  return set;
}

inline CandidateSet generate_candidates(const Relation& rel,
                                        const ConnectiveInventory& inv,
                                        ScoringMode mode) {
  return mode == ScoringMode::kCausal ? generate_causal(rel, inv)
                                      : generate_masked(rel, inv);
}

}  // namespace discex

#endif  // DISCEX_CANDIDATES_HPP_
