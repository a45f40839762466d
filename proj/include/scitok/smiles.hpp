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

// Surface-grammar check for SMILES strings.
//
// This is a context-free check in the spirit of OpenSMILES: atoms (organic
// subset, bracket atoms, wildcard), bonds, branches, ring closures (single
// digit or %nn) and the '.' disconnection. It does not check valence or
// aromaticity, so it accepts strings a chemistry toolkit would reject.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <string_view>
#include <vector>

namespace scitok {
namespace smiles_detail {

inline constexpr std::array<std::string_view, 118> kElements = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
    "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
    "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
    "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
    "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
    "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

inline constexpr std::array<std::string_view, 8> kAromaticBracket = {
    "se", "as", "te", "b", "c", "n", "o", "p"};

inline bool is_element(std::string_view sym) {
  return std::find(kElements.begin(), kElements.end(), sym) != kElements.end();
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Parses the inside of a bracket atom, i.e. the text between '[' and ']'.
inline bool valid_bracket_body(std::string_view b) {
  std::size_t i = 0;
  // isotope
  std::size_t digits = 0;
  while (i < b.size() && is_digit(b[i]) && digits < 3) ++i, ++digits;
  if (i < b.size() && is_digit(b[i])) return false;

  // element symbol, longest match first
  if (i >= b.size()) return false;
  if (b[i] == '*') {
    ++i;
  } else if (std::isupper(static_cast<unsigned char>(b[i]))) {
    if (i + 1 < b.size() && std::islower(static_cast<unsigned char>(b[i + 1])) &&
        is_element(b.substr(i, 2))) {
      i += 2;
    } else if (is_element(b.substr(i, 1))) {
      i += 1;
    } else {
      return false;
    }
  } else {
    bool matched = false;
    for (std::string_view a : kAromaticBracket) {
      if (b.substr(i, a.size()) == a) {
        i += a.size();
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }

  // chirality
  if (i < b.size() && b[i] == '@') {
    ++i;
    if (i < b.size() && b[i] == '@') {
      ++i;
    } else if (i + 1 < b.size()) {
      const std::string_view cls = b.substr(i, 2);
      if (cls == "TH" || cls == "AL" || cls == "SP" || cls == "TB" ||
          cls == "OH") {
        i += 2;
        std::size_t n = 0;
        while (i < b.size() && is_digit(b[i]) && n < 2) ++i, ++n;
        if (n == 0) return false;
      }
    }
  }

  // hydrogen count
  if (i < b.size() && b[i] == 'H') {
    ++i;
    if (i < b.size() && is_digit(b[i])) ++i;
  }

  // charge
  if (i < b.size() && (b[i] == '+' || b[i] == '-')) {
    const char sign = b[i++];
    if (i < b.size() && b[i] == sign) {
      ++i;
    } else {
      std::size_t n = 0;
      while (i < b.size() && is_digit(b[i]) && n < 2) ++i, ++n;
    }
  }

  // atom class
  if (i < b.size() && b[i] == ':') {
    ++i;
    std::size_t n = 0;
    while (i < b.size() && is_digit(b[i])) ++i, ++n;
    if (n == 0) return false;
  }
  return i == b.size();
}

}  // namespace smiles_detail

/// True iff `candidate` is a syntactically well-formed SMILES string:
/// balanced branches and brackets, valid element symbols inside brackets,
/// every ring-closure label closed, and no dangling bonds.
inline bool validate_smiles(std::string_view s) {
  using namespace smiles_detail;
  enum class Last { kNone, kAtom, kRing, kBond, kOpen, kClose, kDot };

  if (s.empty()) return false;

  Last last = Last::kNone;
  Last before_bond = Last::kNone;
  int depth = 0;
  std::size_t atom_count = 0;
  std::size_t current_atom = 0;
  // open_ring[label] = atom index + 1 of the opening atom, 0 when closed.
  std::array<std::size_t, 100> open_ring{};

  auto atom = [&]() {
    current_atom = ++atom_count;
    last = Last::kAtom;
  };
  auto ring = [&](int label) {
    const bool after_atom = last == Last::kAtom || last == Last::kRing;
    const bool after_bond_on_atom =
        last == Last::kBond &&
        (before_bond == Last::kAtom || before_bond == Last::kRing);
    if (!after_atom && !after_bond_on_atom) return false;
    auto& slot = open_ring[static_cast<std::size_t>(label)];
    if (slot == 0) {
      slot = current_atom;
    } else {
      if (slot == current_atom) return false;
      slot = 0;
    }
    last = Last::kRing;
    return true;
  };

  for (std::size_t i = 0; i < s.size();) {
    const char c = s[i];
    switch (c) {
      case '[': {
        const std::size_t close = s.find(']', i + 1);
        if (close == std::string_view::npos) return false;
        const std::string_view body = s.substr(i + 1, close - i - 1);
        if (body.find('[') != std::string_view::npos) return false;
        if (!valid_bracket_body(body)) return false;
        atom();
        i = close + 1;
        continue;
      }
      case ']':
        return false;
      case 'B':
      case 'C':
        if (i + 1 < s.size() &&
            ((c == 'B' && s[i + 1] == 'r') || (c == 'C' && s[i + 1] == 'l'))) {
          atom();
          i += 2;
          continue;
        }
        atom();
        break;
      case 'N': case 'O': case 'P': case 'S': case 'F': case 'I':
      case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
      case '*':
        atom();
        break;
      case '-': case '=': case '#': case '$': case ':': case '/': case '\\':
        if (last != Last::kAtom && last != Last::kRing &&
            last != Last::kClose && last != Last::kOpen) {
          return false;
        }
        before_bond = last;
        last = Last::kBond;
        break;
      case '(':
        if (last != Last::kAtom && last != Last::kRing && last != Last::kClose)
          return false;
        ++depth;
        last = Last::kOpen;
        break;
      case ')':
        if (depth == 0) return false;
        if (last != Last::kAtom && last != Last::kRing && last != Last::kClose)
          return false;
        --depth;
        last = Last::kClose;
        break;
      case '.':
        if (last != Last::kAtom && last != Last::kRing && last != Last::kClose)
          return false;
        last = Last::kDot;
        break;
      case '%': {
        if (i + 2 >= s.size() || !is_digit(s[i + 1]) || !is_digit(s[i + 2]))
          return false;
        if (!ring((s[i + 1] - '0') * 10 + (s[i + 2] - '0'))) return false;
        i += 3;
        continue;
      }
      default:
        if (is_digit(c)) {
          if (!ring(c - '0')) return false;
          break;
        }
        return false;
    }
    ++i;
  }

  if (depth != 0) return false;
  if (last != Last::kAtom && last != Last::kRing && last != Last::kClose)
    return false;
  return std::all_of(open_ring.begin(), open_ring.end(),
                     [](std::size_t v) { return v == 0; });
}

}  // namespace scitok
