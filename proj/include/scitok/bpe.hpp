// Copyright 2026 The scitok Authors
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

// Per-modality byte-pair-encoding vocabularies.
//
// TEXT vocabularies start from the 256 single bytes, so every input can be
// encoded. Scientific vocabularies start from single characters and reserve
// local id 0 for an unknown token that stands in for characters outside the
// alphabet.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scitok/error.hpp"
#include "scitok/modality.hpp"
#include "scitok/utf8.hpp"

namespace scitok {

using TokenId = std::uint32_t;

struct Merge {
  std::string left;
  std::string right;

  std::string joined() const { return left + right; }
  auto operator<=>(const Merge&) const = default;
};

inline constexpr std::string_view kUnknownToken = "<unk>";

inline std::vector<std::string> byte_alphabet() {
  std::vector<std::string> out;
  out.reserve(256);
  for (int b = 0; b < 256; ++b) out.emplace_back(1, static_cast<char>(b));
  return out;
}

namespace bpe_detail {

inline constexpr std::uint64_t pair_key(TokenId a, TokenId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace bpe_detail

// One token produced by Vocabulary::tokenize, with its byte range in the
// input string.
struct Piece {
  TokenId id;
  std::size_t begin;
  std::size_t end;
};

class Vocabulary {
 public:
  Vocabulary() = default;

  // Builds the token table from an initial alphabet and an ordered merge
  // list. Each merge must join two tokens that already exist at that point.
  static Vocabulary create(Modality modality, std::vector<std::string> alphabet,
                           std::vector<Merge> merges) {
    Vocabulary v;
    v.modality_ = modality;
    if (modality == Modality::kText) {
      if (alphabet != byte_alphabet()) {
        throw Error(ErrorCode::kContract,
                    "TEXT vocabularies must use the 256-byte alphabet");
      }
    } else {
      v.tokens_.emplace_back(kUnknownToken);
      for (const auto& a : alphabet) {
        if (a.empty() || !utf8::is_valid(a) || utf8::scalar_count(a) != 1) {
          throw Error(ErrorCode::kContract,
                      std::string(to_string(modality)) +
                          " alphabet entries must be single characters");
        }
      }
    }
    for (const auto& a : alphabet) {
      if (v.index_.contains(a)) {
        throw Error(ErrorCode::kContract, "duplicate alphabet symbol");
      }
      v.add_token(a);
    }
    v.alphabet_ = std::move(alphabet);

    v.rules_.reserve(merges.size());
    for (std::size_t rank = 0; rank < merges.size(); ++rank) {
      const Merge& m = merges[rank];
      const auto l = v.find(m.left);
      const auto r = v.find(m.right);
      if (!l || !r) {
        throw Error(ErrorCode::kContract,
                    "merge " + std::to_string(rank) +
                        " uses a token that does not exist yet");
      }
      const std::string joined = m.joined();
      TokenId out = 0;
      if (auto existing = v.find(joined)) {
        out = *existing;
      } else {
        out = v.add_token(joined);
      }
      // A pair listed twice fires in both passes.
      auto& rule = v.rules_[bpe_detail::pair_key(*l, *r)];
      rule.out = out;
      rule.ranks.push_back(static_cast<std::uint32_t>(rank));
    }
    v.merges_ = std::move(merges);
    return v;
  }

  // Vocabulary with no merges.
  static Vocabulary character_level(Modality modality,
                                    std::vector<std::string> alphabet) {
    return create(modality, std::move(alphabet), {});
  }

  Modality modality() const { return modality_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<Merge>& merges() const { return merges_; }
  std::size_t size() const { return tokens_.size(); }
  bool has_unknown() const { return modality_ != Modality::kText; }
  TokenId unknown_id() const { return 0; }

  const std::string& token(TokenId id) const { return tokens_.at(id); }

  std::optional<TokenId> find(std::string_view s) const {
    auto it = index_.find(std::string(s));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Splits `text` into initial symbols and applies merges in training order
  // (all occurrences of merge k, left to right, before merge k+1). The
  // result equals running each merge as a full pass over the symbol list.
  std::vector<Piece> tokenize(std::string_view text,
                              std::size_t* unknown = nullptr) const {
    std::vector<Piece> pieces = symbolize(text, unknown);
    apply_merges(pieces);
    return pieces;
  }

  std::vector<Piece> symbolize(std::string_view text,
                               std::size_t* unknown = nullptr) const {
    std::vector<Piece> out;
    out.reserve(text.size());
    if (modality_ == Modality::kText) {
      for (std::size_t i = 0; i < text.size(); ++i) {
        out.push_back({static_cast<TokenId>(static_cast<unsigned char>(text[i])),
                       i, i + 1});
      }
      return out;
    }
    for (std::size_t i = 0; i < text.size();) {
      const std::size_t n = utf8::sequence_length(text, i);
      if (n == 0) {
        throw Error(ErrorCode::kInvalidUtf8, "invalid UTF-8 sequence");
      }
      const auto id = find(text.substr(i, n));
      if (id) {
        out.push_back({*id, i, i + n});
      } else {
        out.push_back({unknown_id(), i, i + n});
        if (unknown != nullptr) ++*unknown;
      }
      i += n;
    }
    return out;
  }

  void apply_merges(std::vector<Piece>& pieces) const {
    if (rules_.empty() || pieces.size() < 2) return;
    const std::size_t n = pieces.size();
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> prev(n), next(n);
    std::vector<bool> alive(n, true);
    for (std::size_t i = 0; i < n; ++i) {
      prev[i] = i == 0 ? kNone : i - 1;
      next[i] = i + 1 == n ? kNone : i + 1;
    }

    struct Candidate {
      std::uint32_t rank;
      std::size_t pos;
      TokenId left;
      TokenId right;
      bool operator>(const Candidate& o) const {
        return rank != o.rank ? rank > o.rank : pos > o.pos;
      }
    };
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
    auto consider = [&](std::size_t pos, std::int64_t floor_rank) {
      if (pos == kNone || next[pos] == kNone) return;
      const TokenId l = pieces[pos].id;
      const TokenId r = pieces[next[pos]].id;
      auto it = rules_.find(bpe_detail::pair_key(l, r));
      if (it == rules_.end()) return;
      // A pair formed during pass k only fires in later passes.
      const auto& ranks = it->second.ranks;
      auto rank = std::upper_bound(
          ranks.begin(), ranks.end(), floor_rank,
          [](std::int64_t f, std::uint32_t x) {
            return f < static_cast<std::int64_t>(x);
          });
      if (rank == ranks.end()) return;
      heap.push({*rank, pos, l, r});
    };
    for (std::size_t i = 0; i + 1 < n; ++i) consider(i, -1);

    while (!heap.empty()) {
      const Candidate c = heap.top();
      heap.pop();
      if (!alive[c.pos] || pieces[c.pos].id != c.left) continue;
      const std::size_t r = next[c.pos];
      if (r == kNone || pieces[r].id != c.right) continue;

      pieces[c.pos].id = rules_.at(bpe_detail::pair_key(c.left, c.right)).out;
      pieces[c.pos].end = pieces[r].end;
      alive[r] = false;
      next[c.pos] = next[r];
      if (next[r] != kNone) prev[next[r]] = c.pos;

      consider(prev[c.pos], c.rank);
      consider(c.pos, c.rank);
    }

    std::size_t w = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (alive[i]) pieces[w++] = pieces[i];
    }
    pieces.resize(w);
  }

 private:
  struct Rule {
    std::vector<std::uint32_t> ranks;  // ascending
    TokenId out = 0;
  };

  TokenId add_token(const std::string& s) {
    const auto id = static_cast<TokenId>(tokens_.size());
    tokens_.push_back(s);
    index_.emplace(s, id);
    return id;
  }

  Modality modality_ = Modality::kText;
  std::vector<std::string> alphabet_;
  std::vector<Merge> merges_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::unordered_map<std::uint64_t, Rule> rules_;
};

/// Greedy pair-merge BPE. Repeatedly merges the most frequent adjacent pair
/// (ties: lexicographically smallest (left, right) by bytes) until the
/// vocabulary, not counting the unknown token, holds `target_size` tokens or
/// no pair occurs at least twice.
inline Vocabulary train_bpe(const std::vector<std::string>& corpus,
                            Modality modality, std::size_t target_size) {
  using bpe_detail::pair_key;
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyInput, "train_bpe: empty corpus");
  }

  // Unique training strings with multiplicity. Order does not matter: the
  // tie-break is on token strings, never on position.
  std::map<std::string, std::int64_t> unique;
  for (const auto& s : corpus) ++unique[s];

  std::vector<std::string> alphabet;
  if (modality == Modality::kText) {
    alphabet = byte_alphabet();
  } else {
    std::map<std::string, bool> chars;
    for (const auto& [s, _] : unique) {
      for (auto& c : utf8::split_scalars(s)) chars.emplace(std::move(c), true);
    }
    for (auto& [c, _] : chars) alphabet.push_back(c);
  }
  if (target_size < alphabet.size()) {
    throw Error(ErrorCode::kContract,
                "train_bpe: target_size " + std::to_string(target_size) +
                    " is smaller than the alphabet (" +
                    std::to_string(alphabet.size()) + ")");
  }

  std::vector<std::string> tokens = alphabet;
  std::unordered_map<std::string, TokenId> index;
  for (TokenId i = 0; i < tokens.size(); ++i) index.emplace(tokens[i], i);

  std::vector<std::vector<TokenId>> words;
  std::vector<std::int64_t> freq;
  words.reserve(unique.size());
  for (const auto& [s, f] : unique) {
    std::vector<TokenId> w;
    if (modality == Modality::kText) {
      for (unsigned char b : s) w.push_back(b);
    } else {
      for (const auto& c : utf8::split_scalars(s)) w.push_back(index.at(c));
    }
    words.push_back(std::move(w));
    freq.push_back(f);
  }

  std::unordered_map<std::uint64_t, std::int64_t> counts;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where;
  for (std::uint32_t w = 0; w < words.size(); ++w) {
    const auto& sym = words[w];
    for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
      const auto k = pair_key(sym[i], sym[i + 1]);
      counts[k] += freq[w];
      auto& ws = where[k];
      if (ws.empty() || ws.back() != w) ws.push_back(w);
    }
  }

  struct Entry {
    std::int64_t count;
    TokenId left;
    TokenId right;
  };
  auto worse = [&tokens](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count < b.count;
    const std::string& al = tokens[a.left];
    const std::string& bl = tokens[b.left];
    if (al != bl) return al > bl;
    return tokens[a.right] > tokens[b.right];
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (const auto& [k, c] : counts) {
    heap.push({c, static_cast<TokenId>(k >> 32),
               static_cast<TokenId>(k & 0xffffffffu)});
  }

  std::vector<Merge> merges;
  std::vector<std::uint64_t> touched;
  while (tokens.size() < target_size && !heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    const auto key = pair_key(top.left, top.right);
    auto cit = counts.find(key);
    if (cit == counts.end() || cit->second != top.count) continue;  // stale
    if (top.count < 2) break;

    const std::string joined = tokens[top.left] + tokens[top.right];
    merges.push_back({tokens[top.left], tokens[top.right]});
    TokenId out = 0;
    if (auto it = index.find(joined); it != index.end()) {
      out = it->second;
    } else {
      out = static_cast<TokenId>(tokens.size());
      tokens.push_back(joined);
      index.emplace(joined, out);
    }

    std::vector<std::uint32_t> affected = std::move(where[key]);
    where.erase(key);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()),
                   affected.end());

    touched.clear();
    for (std::uint32_t w : affected) {
      auto& sym = words[w];
      const std::int64_t f = freq[w];
      std::vector<TokenId> merged;
      merged.reserve(sym.size());
      bool hit = false;
      for (std::size_t i = 0; i < sym.size();) {
        if (i + 1 < sym.size() && sym[i] == top.left &&
            sym[i + 1] == top.right) {
          merged.push_back(out);
          i += 2;
          hit = true;
        } else {
          merged.push_back(sym[i]);
          ++i;
        }
      }
      if (!hit) continue;
      for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
        const auto k = pair_key(sym[i], sym[i + 1]);
        counts[k] -= f;
        touched.push_back(k);
      }
      for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        const auto k = pair_key(merged[i], merged[i + 1]);
        counts[k] += f;
        touched.push_back(k);
        if (merged[i] == out || merged[i + 1] == out) {
          auto& ws = where[k];
          if (ws.empty() || ws.back() != w) ws.push_back(w);
        }
      }
      sym = std::move(merged);
    }

    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (const auto k : touched) {
      auto it = counts.find(k);
      if (it->second <= 0) {
        counts.erase(it);
      } else {
        heap.push({it->second, static_cast<TokenId>(k >> 32),
                   static_cast<TokenId>(k & 0xffffffffu)});
      }
    }
  }

  return Vocabulary::create(modality, std::move(alphabet), std::move(merges));
}

}  // namespace scitok
