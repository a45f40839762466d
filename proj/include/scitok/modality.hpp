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

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include "scitok/error.hpp"

namespace scitok {

// The order of the enumerators is the partition order of a VocabularySet.
enum class Modality : std::size_t {
  kText = 0,
  kSmiles = 1,
  kNucleotide = 2,
  kProtein = 3,
};

inline constexpr std::size_t kNumModalities = 4;

inline constexpr std::array<Modality, kNumModalities> kAllModalities = {
    Modality::kText, Modality::kSmiles, Modality::kNucleotide,
    Modality::kProtein};

inline constexpr std::size_t index_of(Modality m) {
  return static_cast<std::size_t>(m);
}

inline constexpr bool is_scientific(Modality m) { return m != Modality::kText; }

inline constexpr std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::kText: return "TEXT";
    case Modality::kSmiles: return "SMILES";
    case Modality::kNucleotide: return "NUCLEOTIDE";
    case Modality::kProtein: return "PROTEIN";
  }
  return "?";
}

inline std::optional<Modality> parse_modality(std::string_view name) {
  for (Modality m : kAllModalities) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

inline Modality modality_from_string(std::string_view name) {
  if (auto m = parse_modality(name)) return *m;
  throw Error(ErrorCode::kFormat,
              "unknown modality '" + std::string(name) + "'");
}

}  // namespace scitok
