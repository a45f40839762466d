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

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scitok/bpe.hpp"
#include "scitok/error.hpp"
#include "scitok/modality.hpp"
#include "scitok/utf8.hpp"

namespace scitok {

// Half-open global id range [offset, offset + size).
struct Partition {
  TokenId offset = 0;
  TokenId size = 0;

  bool contains(TokenId id) const { return id >= offset && id - offset < size; }
  TokenId end() const { return offset + size; }
  bool operator==(const Partition&) const = default;
};

struct SpecialToken {
  std::string_view name;
  std::string_view surface;  // text re-materialised by decode
};

// Specials occupy global ids 0..kSpecials.size()-1 in this order.
inline constexpr std::array<SpecialToken, 8> kSpecials = {{
    {"<pad>", ""},
    {"<unk>", "\xEF\xBF\xBD"},
    {"<SMILES>", "<SMILES>"},
    {"</SMILES>", "</SMILES>"},
    {"<FASTA:NUCLEOTIDE>", "<FASTA>"},
    {"</FASTA:NUCLEOTIDE>", "</FASTA>"},
    {"<FASTA:PROTEIN>", "<FASTA>"},
    {"</FASTA:PROTEIN>", "</FASTA>"},
}};

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;

/// Cumulative partition layout: specials first, then the modalities in
/// enum order.
inline std::array<Partition, kNumModalities> compute_partitions(
    const std::array<std::size_t, kNumModalities>& sizes,
    std::size_t num_specials) {
  std::array<Partition, kNumModalities> out{};
  std::uint64_t offset = num_specials;
  for (std::size_t m = 0; m < kNumModalities; ++m) {
    if (offset + sizes[m] > 0xffffffffull) {
      throw Error(ErrorCode::kContract, "vocabulary exceeds the 32-bit id space");
    }
    out[m] = Partition{static_cast<TokenId>(offset),
                       static_cast<TokenId>(sizes[m])};
    offset += sizes[m];
  }
  return out;
}

namespace byte_level {

// Reversible byte <-> printable code point table (the GPT-2 convention), so
// byte tokens survive a round trip through UTF-8 JSON.
inline const std::array<char32_t, 256>& byte_to_char() {
  static const std::array<char32_t, 256> table = [] {
    std::array<char32_t, 256> t{};
    char32_t extra = 256;
    for (int b = 0; b < 256; ++b) {
      const bool printable = (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) ||
                             (b >= 0xAE && b <= 0xFF);
      t[b] = printable ? static_cast<char32_t>(b) : extra++;
    }
    return t;
  }();
  return table;
}

inline std::string encode(std::string_view bytes) {
  std::string out;
  for (unsigned char b : bytes) utf8::append(out, byte_to_char()[b]);
  return out;
}

inline std::string decode(std::string_view printable) {
  std::string out;
  const auto& table = byte_to_char();
  for (const auto& ch : utf8::split_scalars(printable)) {
    char32_t cp = 0;
    const auto* p = reinterpret_cast<const unsigned char*>(ch.data());
    switch (ch.size()) {
      case 1: cp = p[0]; break;
      case 2: cp = ((p[0] & 0x1Fu) << 6) | (p[1] & 0x3Fu); break;
      default:
        throw Error(ErrorCode::kFormat, "not a byte-level symbol");
    }
    const auto it = std::find(table.begin(), table.end(), cp);
    if (it == table.end()) {
      throw Error(ErrorCode::kFormat, "not a byte-level symbol");
    }
    out.push_back(static_cast<char>(it - table.begin()));
  }
  return out;
}

}  // namespace byte_level

inline std::vector<std::string> default_alphabet(Modality m) {
  std::vector<std::string> out;
  auto chars = [&](std::string_view s) {
    for (char c : s) out.emplace_back(1, c);
  };
  switch (m) {
    case Modality::kText:
      return byte_alphabet();
    case Modality::kSmiles:
      for (char c = '!'; c <= '~'; ++c) out.emplace_back(1, c);
      break;
    case Modality::kNucleotide:
      chars("-ACGNTU");
      break;
    case Modality::kProtein:
      chars("-ACDEFGHIKLMNPQRSTVWXY");
      break;
  }
  return out;
}

/// Per-modality vocabularies laid out in disjoint global id ranges.
class VocabularySet {
 public:
  static constexpr int kFormatVersion = 1;

  struct Resolved {
    bool special = false;
    std::size_t special_index = 0;
    Modality modality = Modality::kText;
    TokenId local = 0;
  };

  /// Requires exactly one vocabulary per modality, in any order.
  static VocabularySet assemble(std::vector<Vocabulary> vocabularies) {
    VocabularySet vs;
    std::array<bool, kNumModalities> seen{};
    for (auto& v : vocabularies) {
      const std::size_t m = index_of(v.modality());
      if (seen[m]) {
        throw Error(ErrorCode::kContract,
                    "assemble: duplicate vocabulary for " +
                        std::string(to_string(v.modality())));
      }
      seen[m] = true;
      vs.vocabs_[m] = std::move(v);
    }
    for (Modality m : kAllModalities) {
      if (!seen[index_of(m)]) {
        throw Error(ErrorCode::kContract, "assemble: missing vocabulary for " +
                                              std::string(to_string(m)));
      }
    }
    std::array<std::size_t, kNumModalities> sizes{};
    for (std::size_t m = 0; m < kNumModalities; ++m) sizes[m] = vs.vocabs_[m].size();
    vs.partitions_ = compute_partitions(sizes, kSpecials.size());
    return vs;
  }

  static VocabularySet character_level() {
    std::vector<Vocabulary> v;
    for (Modality m : kAllModalities) {
      v.push_back(Vocabulary::character_level(m, default_alphabet(m)));
    }
    return assemble(std::move(v));
  }

  // Same set with one modality's vocabulary replaced.
  VocabularySet with(Vocabulary replacement) const {
    std::vector<Vocabulary> v(vocabs_.begin(), vocabs_.end());
    v[index_of(replacement.modality())] = std::move(replacement);
    return assemble(std::move(v));
  }

  const Vocabulary& vocabulary(Modality m) const { return vocabs_[index_of(m)]; }
  const Partition& partition(Modality m) const { return partitions_[index_of(m)]; }
  std::size_t num_specials() const { return kSpecials.size(); }
  std::size_t size() const { return partitions_.back().end(); }

  TokenId global_id(Modality m, TokenId local) const {
    return partition(m).offset + local;
  }

  static TokenId open_tag(Modality m) {
    return static_cast<TokenId>(2 * index_of(m));
  }
  static TokenId close_tag(Modality m) { return open_tag(m) + 1; }

  std::optional<Resolved> resolve(TokenId id) const {
    if (id < kSpecials.size()) {
      return Resolved{true, id, Modality::kText, 0};
    }
    for (Modality m : kAllModalities) {
      const Partition& p = partition(m);
      if (p.contains(id)) return Resolved{false, 0, m, id - p.offset};
    }
    return std::nullopt;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    for (Modality m : kAllModalities) {
      const Partition& p = partition(m);
      j["partitions"][std::string(to_string(m))] = {{"offset", p.offset},
                                                    {"size", p.size}};
      const Vocabulary& v = vocabulary(m);
      const bool bytes = m == Modality::kText;
      auto sym = [bytes](const std::string& s) {
        return bytes ? byte_level::encode(s) : s;
      };
      nlohmann::json alphabet = nlohmann::json::array();
      for (const auto& a : v.alphabet()) alphabet.push_back(sym(a));
      nlohmann::json merges = nlohmann::json::array();
      for (const auto& mg : v.merges()) {
        merges.push_back({sym(mg.left), sym(mg.right)});
      }
      auto& entry = j["modalities"][std::string(to_string(m))];
      entry["alphabet"] = std::move(alphabet);
      entry["merges"] = std::move(merges);
      entry["byte_level"] = bytes;
    }
    for (std::size_t i = 0; i < kSpecials.size(); ++i) {
      j["specials"][std::string(kSpecials[i].name)] = i;
    }
    return j;
  }

  static VocabularySet from_json(const nlohmann::json& j) {
    try {
      if (j.at("format_version").get<int>() != kFormatVersion) {
        throw Error(ErrorCode::kFormat, "unsupported vocab format_version");
      }
      std::vector<Vocabulary> vocabs;
      for (Modality m : kAllModalities) {
        const auto& entry = j.at("modalities").at(std::string(to_string(m)));
        const bool bytes = entry.value("byte_level", m == Modality::kText);
        auto sym = [bytes](const std::string& s) {
          return bytes ? byte_level::decode(s) : s;
        };
        std::vector<std::string> alphabet;
        for (const auto& a : entry.at("alphabet")) {
          alphabet.push_back(sym(a.get<std::string>()));
        }
        std::vector<Merge> merges;
        for (const auto& mg : entry.at("merges")) {
          if (!mg.is_array() || mg.size() != 2) {
            throw Error(ErrorCode::kFormat, "merge entries must be pairs");
          }
          merges.push_back({sym(mg[0].get<std::string>()),
                            sym(mg[1].get<std::string>())});
        }
        vocabs.push_back(
            Vocabulary::create(m, std::move(alphabet), std::move(merges)));
      }
      VocabularySet vs = assemble(std::move(vocabs));

      // The stored layout is redundant; it must agree with the rebuilt one.
      for (Modality m : kAllModalities) {
        const auto& p = j.at("partitions").at(std::string(to_string(m)));
        const Partition stored{p.at("offset").get<TokenId>(),
                               p.at("size").get<TokenId>()};
        if (!(stored == vs.partition(m))) {
          throw Error(ErrorCode::kFormat,
                      "partition for " + std::string(to_string(m)) +
                          " does not match its vocabulary");
        }
      }
      const auto& specials = j.at("specials");
      if (specials.size() != kSpecials.size()) {
        throw Error(ErrorCode::kFormat, "unexpected special-token table");
      }
      for (std::size_t i = 0; i < kSpecials.size(); ++i) {
        if (specials.at(std::string(kSpecials[i].name)).get<std::size_t>() != i) {
          throw Error(ErrorCode::kFormat, "unexpected special-token table");
        }
      }
      return vs;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat, std::string("vocab file: ") + e.what());
    }
  }

  std::string serialize() const { return to_json().dump(1) + "\n"; }

  static VocabularySet parse(std::string_view content) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat, std::string("vocab file: ") + e.what());
    }
    return from_json(j);
  }

  static VocabularySet load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kFormat, "cannot open vocab file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

 private:
  std::array<Vocabulary, kNumModalities> vocabs_;
  std::array<Partition, kNumModalities> partitions_{};
};

}  // namespace scitok
