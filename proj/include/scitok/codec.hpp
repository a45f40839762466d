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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "scitok/bpe.hpp"
#include "scitok/detector.hpp"
#include "scitok/error.hpp"
#include "scitok/utf8.hpp"
#include "scitok/vocab.hpp"

namespace scitok {

// Character range [start, end) of the source text a token stands for.
struct Alignment {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Alignment&) const = default;
};

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<Alignment> alignments;
  // span_token_end[k] = number of tokens emitted for spans 0..k.
  std::vector<std::size_t> span_token_end;
  // Characters replaced by a modality's unknown token.
  std::size_t unknown_count = 0;

  std::size_t size() const { return ids.size(); }
};

/// Tokenizes every span with its own modality's vocabulary and concatenates
/// the global ids in span order. TAG spans are wrapped in their modality's
/// open/close special tokens; the specials are aligned to the delimiter text
/// they replace, so all alignments together tile the source.
inline TokenSequence encode(const SegmentedText& seg, const VocabularySet& vs) {
  TokenSequence out;
  const utf8::Index index(seg.text);
  const std::string_view text(seg.text);
  out.span_token_end.reserve(seg.spans.size());

  for (const Span& span : seg.spans) {
    if (span.tag) {
      out.ids.push_back(VocabularySet::open_tag(span.modality));
      out.alignments.push_back({span.tag->open_start, span.start});
    }
    const std::size_t base = index.byte_offset(span.start);
    const std::string_view payload =
        text.substr(base, index.byte_offset(span.end) - base);
    const Vocabulary& vocab = vs.vocabulary(span.modality);
    const TokenId offset = vs.partition(span.modality).offset;
    for (const Piece& p : vocab.tokenize(payload, &out.unknown_count)) {
      out.ids.push_back(offset + p.id);
      // A character belongs to the token holding its first byte.
      out.alignments.push_back({index.scalar_at_or_after(base + p.begin),
                                index.scalar_at_or_after(base + p.end)});
    }
    if (span.tag) {
      out.ids.push_back(VocabularySet::close_tag(span.modality));
      out.alignments.push_back({span.end, span.tag->close_end});
    }
    out.span_token_end.push_back(out.ids.size());
  }
  return out;
}

inline TokenSequence encode(std::string text, const VocabularySet& vs,
                            const DetectorConfig& rules) {
  return encode(segment(std::move(text), rules), vs);
}

/// Inverse of encode. Unknown-token ids decode to U+FFFD, so the round trip
/// is exact whenever encode made no substitutions.
inline std::string decode(const std::vector<TokenId>& ids,
                          const VocabularySet& vs) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto r = vs.resolve(ids[i]);
    if (!r) {
      throw Error(ErrorCode::kInvalidId,
                  "token id " + std::to_string(ids[i]) + " at position " +
                      std::to_string(i) + " is outside every partition",
                  i);
    }
    if (r->special) {
      out += kSpecials[r->special_index].surface;
      continue;
    }
    const Vocabulary& v = vs.vocabulary(r->modality);
    if (v.has_unknown() && r->local == v.unknown_id()) {
      out += kSpecials[kUnkId].surface;
    } else {
      out += v.token(r->local);
    }
  }
  return out;
}

inline std::string decode(const TokenSequence& ts, const VocabularySet& vs) {
  return decode(ts.ids, vs);
}

inline std::size_t token_count(std::string text, const VocabularySet& vs,
                               const DetectorConfig& rules) {
  return encode(std::move(text), vs, rules).size();
}

}  // namespace scitok
