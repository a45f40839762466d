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

// Modality detection over mixed text.
//
// A document is split into contiguous spans, each labelled with one
// Modality. Explicit `<SMILES>...</SMILES>` and `<FASTA>...</FASTA>` regions
// win over anything the heuristic rules find; whatever is left becomes TEXT.
// All offsets are Unicode scalar values.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scitok/error.hpp"
#include "scitok/modality.hpp"
#include "scitok/smiles.hpp"
#include "scitok/utf8.hpp"

namespace scitok {

enum class Origin { kTag, kHeuristic, kDefault };

inline constexpr std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::kTag: return "TAG";
    case Origin::kHeuristic: return "HEURISTIC";
    case Origin::kDefault: return "DEFAULT";
  }
  return "?";
}

struct DetectorConfig {
  std::size_t min_smiles_len = 6;
  std::size_t min_fasta_len = 12;
  std::size_t min_protein_len = 16;
  bool enable_heuristics = true;

  bool operator==(const DetectorConfig&) const = default;

  // key=value lines; '#' starts a comment. Unknown keys are an error so that
  // a typo cannot silently fall back to a default.
  static DetectorConfig parse(std::string_view content) {
    DetectorConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
      std::size_t eol = content.find('\n', pos);
      if (eol == std::string_view::npos) eol = content.size();
      std::string_view line = content.substr(pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::kFormat,
                    "config line " + std::to_string(line_no) +
                        ": expected key=value");
      }
      const std::string_view key = trim(line.substr(0, eq));
      const std::string_view value = trim(line.substr(eq + 1));
      if (key == "min_smiles_len") {
        cfg.min_smiles_len = parse_count(value, line_no);
      } else if (key == "min_fasta_len") {
        cfg.min_fasta_len = parse_count(value, line_no);
      } else if (key == "min_protein_len") {
        cfg.min_protein_len = parse_count(value, line_no);
      } else if (key == "enable_heuristics") {
        cfg.enable_heuristics = parse_bool(value, line_no);
      } else {
        throw Error(ErrorCode::kFormat, "config line " +
                                            std::to_string(line_no) +
                                            ": unknown key '" +
                                            std::string(key) + "'");
      }
    }
    return cfg;
  }

  static DetectorConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kFormat, "cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  std::string serialize() const {
    std::ostringstream out;
    out << "min_smiles_len=" << min_smiles_len << '\n'
        << "min_fasta_len=" << min_fasta_len << '\n'
        << "min_protein_len=" << min_protein_len << '\n'
        << "enable_heuristics=" << (enable_heuristics ? "true" : "false")
        << '\n';
    return out.str();
  }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                          s.front() == '\r')) {
      s.remove_prefix(1);
    }
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  }
  static std::size_t parse_count(std::string_view v, std::size_t line_no) {
    std::size_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || out == 0) {
      throw Error(ErrorCode::kFormat, "config line " +
                                          std::to_string(line_no) +
                                          ": expected a positive integer");
    }
    return out;
  }
  static bool parse_bool(std::string_view v, std::size_t line_no) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorCode::kFormat, "config line " + std::to_string(line_no) +
                                        ": expected a boolean");
  }
};

// Character extent of the tag delimiters around a TAG span's payload:
// the opening tag covers [open_start, span.start) and the closing tag
// covers [span.end, close_end).
struct TagExtent {
  std::size_t open_start = 0;
  std::size_t close_end = 0;
  bool operator==(const TagExtent&) const = default;
};

struct Span {
  std::size_t start = 0;  // payload, inclusive
  std::size_t end = 0;    // payload, exclusive
  Modality modality = Modality::kText;
  Origin origin = Origin::kDefault;
  std::optional<TagExtent> tag;

  std::size_t outer_start() const { return tag ? tag->open_start : start; }
  std::size_t outer_end() const { return tag ? tag->close_end : end; }
  std::size_t length() const { return end - start; }

  bool operator==(const Span&) const = default;
};

struct SegmentedText {
  std::string text;
  std::vector<Span> spans;  // sorted; outer extents tile the text
  std::vector<std::string> warnings;
};

namespace detect_detail {

struct TagSpec {
  std::string_view open;
  std::string_view close;
  bool fasta;
};

inline constexpr std::array<TagSpec, 2> kTags = {
    TagSpec{"<SMILES>", "</SMILES>", false},
    TagSpec{"<FASTA>", "</FASTA>", true}};

inline constexpr std::string_view kNucleotideTagAlphabet = "ACGTUN-";
inline constexpr std::string_view kNucleotideAlphabet = "ACGTUN";
inline constexpr std::string_view kProteinAlphabet = "ACDEFGHIKLMNPQRSTVWYX";
inline constexpr std::string_view kProteinTagAlphabet =
    "ACDEFGHIKLMNPQRSTVWYX-";

inline bool all_in(std::string_view s, std::string_view alphabet) {
  return std::all_of(s.begin(), s.end(), [&](char c) {
    return alphabet.find(c) != std::string_view::npos;
  });
}

inline bool any_outside(std::string_view s, std::string_view alphabet) {
  return std::any_of(s.begin(), s.end(), [&](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) &&
           alphabet.find(c) == std::string_view::npos;
  });
}

inline std::optional<Modality> classify_fasta(std::string_view payload) {
  if (all_in(payload, kNucleotideTagAlphabet)) return Modality::kNucleotide;
  if (all_in(payload, kProteinTagAlphabet) &&
      any_outside(payload, kNucleotideAlphabet)) {
    return Modality::kProtein;
  }
  return std::nullopt;
}

// Byte-offset span used before conversion to scalar offsets.
struct RawSpan {
  std::size_t start;
  std::size_t end;
  Modality modality;
  Origin origin;
  std::optional<TagExtent> tag;
};

inline std::vector<RawSpan> scan_tags(std::string_view text,
                                      const utf8::Index& index,
                                      std::vector<std::string>* warnings) {
  std::vector<RawSpan> out;
  const TagSpec* open = nullptr;
  std::size_t open_at = 0;
  std::size_t payload_at = 0;

  auto char_at = [&](std::size_t byte) {
    return index.scalar_at_or_after(byte);
  };

  for (std::size_t pos = text.find('<'); pos != std::string_view::npos;
       pos = text.find('<', pos + 1)) {
    const std::string_view rest = text.substr(pos);
    for (const TagSpec& tag : kTags) {
      if (rest.starts_with(tag.open)) {
        if (open != nullptr) {
          throw Error(ErrorCode::kMalformedTag,
                      std::string(open == &tag ? "nested " : "overlapping ") +
                          std::string(tag.open) + " at character " +
                          std::to_string(char_at(pos)),
                      char_at(pos));
        }
        open = &tag;
        open_at = pos;
        payload_at = pos + tag.open.size();
        pos = payload_at - 1;
        break;
      }
      if (rest.starts_with(tag.close)) {
        if (open != &tag) {
          throw Error(ErrorCode::kMalformedTag,
                      "unmatched " + std::string(tag.close) + " at character " +
                          std::to_string(char_at(pos)),
                      char_at(pos));
        }
        const std::string_view payload =
            text.substr(payload_at, pos - payload_at);
        const std::size_t close_end = pos + tag.close.size();
        std::optional<Modality> modality =
            tag.fasta ? classify_fasta(payload)
                      : std::optional<Modality>(Modality::kSmiles);
        if (payload.empty()) {
          modality.reset();
        }
        if (modality) {
          out.push_back(RawSpan{payload_at, pos, *modality, Origin::kTag,
                                TagExtent{open_at, close_end}});
        } else if (warnings != nullptr) {
          warnings->push_back(std::string(tag.open) + " region at character " +
                              std::to_string(char_at(open_at)) +
                              " has an empty or unrecognised payload; kept as "
                              "TEXT");
        }
        open = nullptr;
        pos = close_end - 1;
        break;
      }
    }
  }
  if (open != nullptr) {
    throw Error(ErrorCode::kMalformedTag,
                "unclosed " + std::string(open->open) + " at character " +
                    std::to_string(char_at(open_at)),
                char_at(open_at));
  }
  return out;
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline constexpr std::string_view kLeadingPunct = "([{\"'";
inline constexpr std::string_view kTrailingPunct = ".,;:!?)]}\"'";
inline constexpr std::string_view kSmilesTrailingPunct = ".,;:!?\"'";

inline std::string_view strip(std::string_view w, std::string_view lead,
                              std::string_view trail, std::size_t* offset) {
  std::size_t b = 0;
  while (b < w.size() && lead.find(w[b]) != std::string_view::npos) ++b;
  std::size_t e = w.size();
  while (e > b && trail.find(w[e - 1]) != std::string_view::npos) --e;
  *offset = b;
  return w.substr(b, e - b);
}

inline int priority(Modality m) {
  switch (m) {
    case Modality::kSmiles: return 0;
    case Modality::kNucleotide: return 1;
    case Modality::kProtein: return 2;
    case Modality::kText: return 3;
  }
  return 3;
}

// A heuristic SMILES candidate made only of lowercase letters is almost
// always an English word ("cocoons"); require some other character.
inline bool looks_like_smiles(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return !(c >= 'a' && c <= 'z');
  });
}

// Best SMILES reading of one whitespace-delimited word: the word itself, or
// the word with sentence punctuation trimmed, or with wrapping parentheses
// removed. Longest valid candidate wins.
inline std::optional<std::pair<std::size_t, std::size_t>> smiles_in_word(
    std::string_view word) {
  std::vector<std::pair<std::size_t, std::size_t>> cands;
  cands.emplace_back(0, word.size());
  std::size_t off = 0;
  std::string_view t = strip(word, "\"'", kSmilesTrailingPunct, &off);
  cands.emplace_back(off, t.size());
  if (t.size() >= 2 && t.front() == '(') {
    std::size_t e = t.size();
    while (e > 1 && t[e - 1] != ')') --e;
    if (e > 1) cands.emplace_back(off + 1, e - 2);
  }
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (auto [b, n] : cands) {
    const std::string_view c = word.substr(b, n);
    if (best && n <= best->second) continue;
    if (looks_like_smiles(c) && validate_smiles(c)) best.emplace(b, n);
  }
  return best;
}

inline std::vector<RawSpan> scan_heuristic(std::string_view text,
                                           const DetectorConfig& rules) {
  std::vector<RawSpan> cands;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t ws = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (ws == i) break;
    const std::string_view word = text.substr(ws, i - ws);

    if (auto sm = smiles_in_word(word); sm && sm->second >= rules.min_smiles_len) {
      cands.push_back(RawSpan{ws + sm->first, ws + sm->first + sm->second,
                              Modality::kSmiles, Origin::kHeuristic, {}});
    }
    std::size_t off = 0;
    const std::string_view core =
        strip(word, kLeadingPunct, kTrailingPunct, &off);
    if (core.empty()) continue;
    if (core.size() >= rules.min_fasta_len &&
        all_in(core, kNucleotideAlphabet)) {
      cands.push_back(RawSpan{ws + off, ws + off + core.size(),
                              Modality::kNucleotide, Origin::kHeuristic, {}});
    }
    if (core.size() >= rules.min_protein_len &&
        all_in(core, kProteinAlphabet) &&
        any_outside(core, kNucleotideAlphabet)) {
      cands.push_back(RawSpan{ws + off, ws + off + core.size(),
                              Modality::kProtein, Origin::kHeuristic, {}});
    }
  }

  // Longest match first, then earlier start, then modality priority.
  std::stable_sort(cands.begin(), cands.end(),
                   [](const RawSpan& a, const RawSpan& b) {
                     const std::size_t la = a.end - a.start;
                     const std::size_t lb = b.end - b.start;
                     if (la != lb) return la > lb;
                     if (a.start != b.start) return a.start < b.start;
                     return priority(a.modality) < priority(b.modality);
                   });
  std::vector<RawSpan> accepted;
  for (const RawSpan& c : cands) {
    const bool clash = std::any_of(
        accepted.begin(), accepted.end(), [&](const RawSpan& a) {
          return c.start < a.end && a.start < c.end;
        });
    if (!clash) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const RawSpan& a, const RawSpan& b) { return a.start < b.start; });
  return accepted;
}

inline Span to_scalar(const RawSpan& r, const utf8::Index& index) {
  Span s;
  s.start = index.scalar_at_or_after(r.start);
  s.end = index.scalar_at_or_after(r.end);
  s.modality = r.modality;
  s.origin = r.origin;
  if (r.tag) {
    s.tag = TagExtent{index.scalar_at_or_after(r.tag->open_start),
                      index.scalar_at_or_after(r.tag->close_end)};
  }
  return s;
}

}  // namespace detect_detail

/// Spans for every well-formed <SMILES>/<FASTA> region, covering the payload
/// only; the delimiters are kept in Span::tag. A FASTA payload is NUCLEOTIDE
/// when it only uses A,C,G,T,U,N,- and PROTEIN when it only uses amino-acid
/// letters, X and - with at least one letter outside the nucleotide set.
/// Regions that are neither (or are empty) are skipped with a warning.
/// Throws Error(kMalformedTag) on unbalanced, nested or overlapping tags.
inline std::vector<Span> detect_tags(std::string_view text,
                                     std::vector<std::string>* warnings =
                                         nullptr) {
  const utf8::Index index(text);
  std::vector<Span> out;
  for (const auto& r : detect_detail::scan_tags(text, index, warnings)) {
    out.push_back(detect_detail::to_scalar(r, index));
  }
  return out;
}

/// Heuristic spans in tag-free text. Candidates are whitespace-delimited
/// words (minus surrounding punctuation) that are entirely SMILES, nucleotide
/// or amino-acid strings of at least the configured minimum length.
inline std::vector<Span> detect_heuristic(std::string_view text,
                                          const DetectorConfig& rules) {
  const utf8::Index index(text);
  std::vector<Span> out;
  for (const auto& r : detect_detail::scan_heuristic(text, rules)) {
    out.push_back(detect_detail::to_scalar(r, index));
  }
  return out;
}

inline SegmentedText segment(std::string text, const DetectorConfig& rules) {
  using detect_detail::RawSpan;
  const utf8::Index index(text);
  SegmentedText seg;
  const std::string_view view(text);

  std::vector<RawSpan> tags = detect_detail::scan_tags(view, index, &seg.warnings);
  std::vector<RawSpan> found;
  std::size_t cursor = 0;
  auto scan_gap = [&](std::size_t b, std::size_t e) {
    if (!rules.enable_heuristics || b >= e) return;
    for (RawSpan r : detect_detail::scan_heuristic(view.substr(b, e - b), rules)) {
      r.start += b;
      r.end += b;
      found.push_back(r);
    }
  };
  for (const RawSpan& t : tags) {
    scan_gap(cursor, t.tag->open_start);
    found.push_back(t);
    cursor = t.tag->close_end;
  }
  scan_gap(cursor, view.size());

  cursor = 0;
  auto fill = [&](std::size_t b, std::size_t e) {
    if (b < e) {
      seg.spans.push_back(detect_detail::to_scalar(
          RawSpan{b, e, Modality::kText, Origin::kDefault, {}}, index));
    }
  };
  for (const RawSpan& r : found) {
    const std::size_t ob = r.tag ? r.tag->open_start : r.start;
    const std::size_t oe = r.tag ? r.tag->close_end : r.end;
    fill(cursor, ob);
    seg.spans.push_back(detect_detail::to_scalar(r, index));
    cursor = oe;
  }
  fill(cursor, view.size());
  seg.text = std::move(text);
  return seg;
}

/// Substring of `seg.text` covered by `span`, including tag delimiters.
inline std::string_view outer_text(const SegmentedText& seg, const Span& span,
                                   const utf8::Index& index) {
  const std::size_t b = index.byte_offset(span.outer_start());
  const std::size_t e = index.byte_offset(span.outer_end());
  return std::string_view(seg.text).substr(b, e - b);
}

}  // namespace scitok
