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

// Characters-per-token compression ratio.
//
//   CR(tokenizer, dataset) = sum_s chars(s) / sum_s tokens(s)
//
// with chars counted in Unicode scalar values. Numerator and denominator are
// summed over the dataset before dividing.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scitok/codec.hpp"
#include "scitok/detector.hpp"
#include "scitok/error.hpp"
#include "scitok/modality.hpp"
#include "scitok/utf8.hpp"
#include "scitok/vocab.hpp"

namespace scitok {

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Order-independent multiset hash of a dataset: document count plus the
// wrapping sum of per-document FNV-1a hashes.
class DatasetFingerprint {
 public:
  void add(std::string_view doc) {
    ++documents_;
    sum_ += fnv1a64(doc);
  }
  std::uint64_t documents() const { return documents_; }
  std::string str() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(sum_));
    return std::to_string(documents_) + ":" + buf;
  }

 private:
  std::uint64_t documents_ = 0;
  std::uint64_t sum_ = 0;
};

struct CharTokenCount {
  std::uint64_t chars = 0;
  std::uint64_t tokens = 0;

  double cr() const {
    return tokens == 0 ? 0.0
                       : static_cast<double>(chars) / static_cast<double>(tokens);
  }
  CharTokenCount& operator+=(const CharTokenCount& o) {
    chars += o.chars;
    tokens += o.tokens;
    return *this;
  }
  bool operator==(const CharTokenCount&) const = default;
};

struct CROptions {
  // Tag specials occupy model positions, so they count by default.
  bool count_specials = true;
};

struct CRReport {
  std::string tokenizer_name;
  std::uint64_t total_chars = 0;
  std::uint64_t total_tokens = 0;
  double cr = 0.0;
  std::uint64_t documents = 0;
  std::string dataset_fingerprint;
  bool count_specials = true;
  // Payload characters of each span go to its modality; tag delimiter
  // characters only count toward the total. Special tokens go to the
  // modality of the span they wrap.
  std::array<CharTokenCount, kNumModalities> per_modality{};

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tokenizer_name"] = tokenizer_name;
    j["total_chars"] = total_chars;
    j["total_tokens"] = total_tokens;
    j["cr"] = cr;
    j["documents"] = documents;
    j["dataset_fingerprint"] = dataset_fingerprint;
    j["count_specials"] = count_specials;
    j["per_modality"] = nlohmann::json::object();
    for (Modality m : kAllModalities) {
      const auto& c = per_modality[index_of(m)];
      if (c.tokens == 0 && c.chars == 0) continue;
      j["per_modality"][std::string(to_string(m))] = {
          {"chars", c.chars}, {"tokens", c.tokens}, {"cr", c.cr()}};
    }
    return j;
  }
};

// Per-document character and token counts, split by modality.
struct DocumentCounts {
  CharTokenCount total;
  std::array<CharTokenCount, kNumModalities> per_modality{};
};

inline DocumentCounts count_document(std::string_view doc,
                                     const VocabularySet& vs,
                                     const DetectorConfig& rules,
                                     const CROptions& options = {}) {
  const SegmentedText seg = segment(std::string(doc), rules);
  const TokenSequence ts = encode(seg, vs);
  DocumentCounts out;
  out.total.chars = utf8::scalar_count(doc);
  std::size_t prev = 0;
  for (std::size_t k = 0; k < seg.spans.size(); ++k) {
    const Span& span = seg.spans[k];
    std::uint64_t tokens = ts.span_token_end[k] - prev;
    prev = ts.span_token_end[k];
    if (span.tag && !options.count_specials) tokens -= 2;
    auto& slot = out.per_modality[index_of(span.modality)];
    slot.chars += span.length();
    slot.tokens += tokens;
    out.total.tokens += tokens;
  }
  return out;
}

// Streaming form of compression_ratio: feed documents one at a time.
class CRAccumulator {
 public:
  CRAccumulator(const VocabularySet& vs, DetectorConfig rules,
                CROptions options = {})
      : vs_(&vs), rules_(rules), options_(options) {}

  void add(std::string_view doc) { add(doc, count_document(doc, *vs_, rules_, options_)); }

  // For callers that computed the counts themselves (e.g. on worker threads).
  void add(std::string_view doc, const DocumentCounts& counts) {
    if (doc.empty()) {
      throw Error(ErrorCode::kContract,
                  "compression_ratio: document " +
                      std::to_string(fingerprint_.documents()) + " is empty");
    }
    if (counts.total.tokens == 0) {
      throw Error(ErrorCode::kContract,
                  "compression_ratio: document " +
                      std::to_string(fingerprint_.documents()) +
                      " produced no tokens");
    }
    fingerprint_.add(doc);
    total_ += counts.total;
    for (std::size_t m = 0; m < kNumModalities; ++m) {
      per_modality_[m] += counts.per_modality[m];
    }
  }

  CRReport report(std::string name) const {
    if (fingerprint_.documents() == 0) {
      throw Error(ErrorCode::kEmptyInput, "compression_ratio: empty dataset");
    }
    CRReport r;
    r.tokenizer_name = std::move(name);
    r.total_chars = total_.chars;
    r.total_tokens = total_.tokens;
    r.cr = total_.cr();
    r.documents = fingerprint_.documents();
    r.dataset_fingerprint = fingerprint_.str();
    r.count_specials = options_.count_specials;
    r.per_modality = per_modality_;
    return r;
  }

 private:
  const VocabularySet* vs_;
  DetectorConfig rules_;
  CROptions options_;
  DatasetFingerprint fingerprint_;
  CharTokenCount total_;
  std::array<CharTokenCount, kNumModalities> per_modality_{};
};

inline CRReport compression_ratio(const VocabularySet& vs,
                                  const DetectorConfig& rules,
                                  const std::vector<std::string>& dataset,
                                  std::string name = "tokenizer",
                                  CROptions options = {}) {
  CRAccumulator acc(vs, rules, options);
  for (const auto& doc : dataset) acc.add(doc);
  return acc.report(std::move(name));
}

struct ComparisonRow {
  std::string name;
  double cr = 0.0;
  std::uint64_t chars = 0;
  std::uint64_t tokens = 0;
};

struct PairwiseImprovement {
  std::string better;
  std::string worse;
  double improvement = 0.0;  // cr_better / cr_worse - 1
};

struct ComparisonTable {
  std::string dataset_fingerprint;
  std::vector<ComparisonRow> rows;          // descending cr
  std::vector<PairwiseImprovement> pairs;   // i < j over rows

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["dataset_fingerprint"] = dataset_fingerprint;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
      j["rows"].push_back(
          {{"name", r.name}, {"cr", r.cr}, {"chars", r.chars}, {"tokens", r.tokens}});
    }
    j["pairwise"] = nlohmann::json::array();
    for (const auto& p : pairs) {
      j["pairwise"].push_back({{"a", p.better},
                               {"b", p.worse},
                               {"improvement", p.improvement}});
    }
    return j;
  }

  std::string to_text() const {
    std::size_t w = std::string_view("tokenizer").size();
    for (const auto& r : rows) w = std::max(w, r.name.size());
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(w)) << "tokenizer"
        << std::right << std::setw(10) << "cr" << std::setw(14) << "chars"
        << std::setw(14) << "tokens" << '\n';
    out << std::fixed << std::setprecision(4);
    for (const auto& r : rows) {
      out << std::left << std::setw(static_cast<int>(w)) << r.name << std::right
          << std::setw(10) << r.cr << std::setw(14) << r.chars << std::setw(14)
          << r.tokens << '\n';
    }
    out << std::setprecision(1);
    for (const auto& p : pairs) {
      out << p.better << " vs " << p.worse << ": " << std::showpos
          << p.improvement * 100.0 << std::noshowpos << "%\n";
    }
    return out.str();
  }
};

/// Ranks reports by CR and lists the relative improvement of every pair.
/// All reports must come from the same dataset.
inline ComparisonTable compare(const std::vector<CRReport>& reports) {
  if (reports.size() < 2) {
    throw Error(ErrorCode::kContract, "compare: need at least two reports");
  }
  for (const auto& r : reports) {
    if (r.dataset_fingerprint != reports.front().dataset_fingerprint) {
      throw Error(ErrorCode::kContract,
                  "compare: dataset fingerprints differ (" +
                      reports.front().dataset_fingerprint + " vs " +
                      r.dataset_fingerprint + ")");
    }
  }
  ComparisonTable t;
  t.dataset_fingerprint = reports.front().dataset_fingerprint;
  for (const auto& r : reports) {
    t.rows.push_back({r.tokenizer_name, r.cr, r.total_chars, r.total_tokens});
  }
  std::stable_sort(t.rows.begin(), t.rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     return a.cr > b.cr;
                   });
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = i + 1; j < t.rows.size(); ++j) {
      t.pairs.push_back({t.rows[i].name, t.rows[j].name,
                         t.rows[i].cr / t.rows[j].cr - 1.0});
    }
  }
  return t;
}

}  // namespace scitok
