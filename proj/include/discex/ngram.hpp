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

// Add-k smoothed n-gram language model.
//
// P(w | h) = (c(h, w) + k) / (c(h) + k * |V|)
//
// where h is the n-1 preceding tokens (padded with a begin-of-sequence
// marker), c(h) counts h as a context, and V is the training vocabulary plus
// the reserved <unk> token. The begin marker is never predicted and there is
// no end-of-sequence event.

#ifndef DISCEX_NGRAM_HPP_
#define DISCEX_NGRAM_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "discex/errors.hpp"
#include "discex/text.hpp"

namespace discex {

inline bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && !is_space(c) && !((c >= 'a' && c <= 'z') ||
                                       (c >= 'A' && c <= 'Z') ||
                                       (c >= '0' && c <= '9'));
}

// Lowercases, splits on whitespace and peels leading and trailing ASCII
// punctuation off each word as separate tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (const std::string& word : split_whitespace(to_lower(text))) {
    size_t b = 0;
    size_t e = word.size();
    while (b < e && is_ascii_punct(word[b])) {
      out.emplace_back(1, word[b]);
      ++b;
    }
    std::vector<std::string> tail;
    while (e > b && is_ascii_punct(word[e - 1])) {
      tail.emplace_back(1, word[e - 1]);
      --e;
    }
    if (e > b) out.push_back(word.substr(b, e - b));
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  return out;
}

class NGramModel {
 public:
  using TokenId = int32_t;
  static constexpr TokenId kUnk = 0;
  static constexpr TokenId kBos = -1;
  static constexpr std::string_view kUnkToken = "<unk>";

  int order() const { return order_; }
  double k() const { return k_; }
  // Includes <unk>.
  size_t vocab_size() const { return id_to_token_.size(); }

  TokenId id(std::string_view token) const {
    auto it = token_to_id_.find(std::string(token));
    return it == token_to_id_.end() ? kUnk : it->second;
  }

  const std::string& token(TokenId id) const { return id_to_token_.at(id); }

  std::vector<TokenId> encode(const std::vector<std::string>& tokens) const {
    std::vector<TokenId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    return ids;
  }

  // Raw n-gram count of `context` followed by `word`.
  double count(std::span<const TokenId> context, TokenId word) const {
    auto it = ngram_counts_.find(key(context, word));
    return it == ngram_counts_.end() ? 0.0 : it->second;
  }

  // Number of times `context` occurred as a conditioning context.
  double context_count(std::span<const TokenId> context) const {
    auto it = context_counts_.find(key(context));
    return it == context_counts_.end() ? 0.0 : it->second;
  }

  // `context` must hold exactly order-1 ids (kBos for padding).
  double probability(std::span<const TokenId> context, TokenId word) const {
    if (static_cast<int>(context.size()) != order_ - 1) {
      throw DataError("n-gram context has wrong length");
    }
    const double v = static_cast<double>(vocab_size());
    return (count(context, word) + k_) / (context_count(context) + k_ * v);
  }

  // log P(t_i | t_{i-n+1..i-1}) for every position of `ids`.
  std::vector<double> conditional_log_probs(
      std::span<const TokenId> ids) const {
    std::vector<double> out;
    out.reserve(ids.size());
    std::vector<TokenId> ctx(order_ - 1);
    for (size_t i = 0; i < ids.size(); ++i) {
      context_at(ids, i, ctx);
      out.push_back(std::log(probability(ctx, ids[i])));
    }
    return out;
  }

  double sequence_log_prob(std::span<const TokenId> ids) const {
    double total = 0.0;
    for (double lp : conditional_log_probs(ids)) total += lp;
    return total;
  }

  double sequence_log_prob(std::string_view text) const {
    const auto ids = encode(tokenize(text));
    return sequence_log_prob(ids);
  }

  // Training. Each sentence is padded independently.
  static NGramModel train(const std::vector<std::vector<std::string>>& sentences,
                          int order, double k) {
    if (order < 1) throw ConfigError("n-gram order must be >= 1");
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw ConfigError("n-gram smoothing k must be > 0");
    }
    NGramModel m;
    m.order_ = order;
    m.k_ = k;
    m.id_to_token_.emplace_back(kUnkToken);
    m.token_to_id_.emplace(std::string(kUnkToken), kUnk);
    size_t total_tokens = 0;
    for (const auto& sentence : sentences) {
      for (const auto& t : sentence) {
        if (m.token_to_id_.emplace(t, static_cast<TokenId>(m.id_to_token_.size()))
                .second) {
          m.id_to_token_.push_back(t);
        }
      }
      total_tokens += sentence.size();
    }
    if (total_tokens == 0) throw DataError("n-gram training text is empty");
    std::vector<TokenId> ctx(order - 1);
    for (const auto& sentence : sentences) {
      const auto ids = m.encode(sentence);
      for (size_t i = 0; i < ids.size(); ++i) {
        m.context_at(ids, i, ctx);
        m.ngram_counts_[key(ctx, ids[i])] += 1.0;
        m.context_counts_[key(ctx)] += 1.0;
      }
    }
    return m;
  }

  // One sentence per non-blank line, tokenized with tokenize().
  static NGramModel train_text(std::string_view text, int order, double k) {
    std::vector<std::vector<std::string>> sentences;
    for (const std::string& line : split(text, '\n')) {
      auto toks = tokenize(line);
      if (!toks.empty()) sentences.push_back(std::move(toks));
    }
    return train(sentences, order, k);
  }

 private:
  void context_at(std::span<const TokenId> ids, size_t i,
                  std::vector<TokenId>& ctx) const {
    const size_t width = static_cast<size_t>(order_ - 1);
    for (size_t j = 0; j < width; ++j) {
      // ctx[j] is the token at position i - width + j.
      const long pos = static_cast<long>(i) - static_cast<long>(width) +
                       static_cast<long>(j);
      ctx[j] = pos < 0 ? kBos : ids[static_cast<size_t>(pos)];
    }
  }

  static std::string key(std::span<const TokenId> context) {
    std::string k;
    k.reserve(context.size() * sizeof(TokenId));
    for (TokenId id : context) {
      k.append(reinterpret_cast<const char*>(&id), sizeof(TokenId));
    }
    return k;
  }

  static std::string key(std::span<const TokenId> context, TokenId word) {
    std::string k = key(context);
    k.append(reinterpret_cast<const char*>(&word), sizeof(TokenId));
    return k;
  }

  int order_ = 1;
  double k_ = 1.0;
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::unordered_map<std::string, double> ngram_counts_;
  std::unordered_map<std::string, double> context_counts_;
};

inline NGramModel train_ngram(
    const std::vector<std::vector<std::string>>& sentences, int order,
    double k) {
  return NGramModel::train(sentences, order, k);
}

}  // namespace discex

#endif  // DISCEX_NGRAM_HPP_
