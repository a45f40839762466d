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


#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "scitok/bpe.hpp"
#include "scitok/utf8.hpp"

namespace scitok {
namespace {

using Symbols = std::vector<std::string>;

Symbols initial_symbols(const std::string& s, Modality m) {
  if (m == Modality::kText) {
    Symbols out;
    for (char c : s) out.emplace_back(1, c);
    return out;
  }
  return utf8::split_scalars(s);
}

// Replaces every non-overlapping (left, right), scanning left to right.
Symbols apply_one(const Symbols& in, const Merge& m) {
  Symbols out;
  for (std::size_t i = 0; i < in.size();) {
    if (i + 1 < in.size() && in[i] == m.left && in[i + 1] == m.right) {
      out.push_back(m.joined());
      i += 2;
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

// Reference trainer: recounts every pair from scratch for every merge.
std::vector<Merge> oracle_train(const std::vector<std::string>& corpus,
                                Modality m, std::size_t target_size) {
  std::vector<Symbols> words;
  std::set<std::string> tokens;
  for (const auto& s : corpus) {
    words.push_back(initial_symbols(s, m));
    for (const auto& c : words.back()) tokens.insert(c);
  }
  if (m == Modality::kText) {
    for (int b = 0; b < 256; ++b) tokens.insert(std::string(1, static_cast<char>(b)));
  }
  std::vector<Merge> merges;
  while (tokens.size() < target_size) {
    std::map<std::pair<std::string, std::string>, long> counts;
    for (const auto& w : words) {
      for (std::size_t i = 0; i + 1 < w.size(); ++i) ++counts[{w[i], w[i + 1]}];
    }
    long best = 0;
    std::pair<std::string, std::string> pick;
    for (const auto& [p, c] : counts) {  // map order = lexicographic tie-break
      if (c > best) {
        best = c;
        pick = p;
      }
    }
    if (best < 2) break;
    const Merge mg{pick.first, pick.second};
    merges.push_back(mg);
    tokens.insert(mg.joined());
    for (auto& w : words) w = apply_one(w, mg);
  }
  return merges;
}

// Reference inference: one full pass per merge, in order.
Symbols oracle_tokenize(const Vocabulary& v, const std::string& s) {
  Symbols sym;
  for (const Piece& p : v.symbolize(s)) sym.push_back(v.token(p.id));
  for (const Merge& m : v.merges()) sym = apply_one(sym, m);
  return sym;
}

Symbols token_strings(const Vocabulary& v, const std::string& s) {
  Symbols out;
  for (const Piece& p : v.tokenize(s)) out.push_back(v.token(p.id));
  return out;
}

std::string random_string(std::mt19937_64& rng, const Symbols& alphabet,
                           std::size_t max_len) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
  return s;
}

TEST(TrainBpe, SingleMergeOnRepeatedPair) {
  const auto v = train_bpe({"CCCC", "CCCC"}, Modality::kSmiles, 2);
  ASSERT_EQ(v.merges().size(), 1u);
  EXPECT_EQ(v.merges()[0], (Merge{"C", "C"}));
  EXPECT_TRUE(v.find("CC").has_value());
}

TEST(TrainBpe, NoBudgetMeansNoMerges) {
  const auto v = train_bpe({"AB"}, Modality::kSmiles, 2);
  EXPECT_TRUE(v.merges().empty());
  EXPECT_EQ(v.alphabet(), (Symbols{"A", "B"}));
}

TEST(TrainBpe, LexicographicTieBreak) {
  // (C,C)=3 first; then (CC,O)=2 and (CC,N)=1.
  const auto v = train_bpe({"CCO", "CCO", "CCN"}, Modality::kSmiles, 5);
  EXPECT_EQ(v.merges(), (std::vector<Merge>{{"C", "C"}, {"CC", "O"}}));
  // Equal counts: (A,B) < (B,A) < (C,D).
  const auto w = train_bpe({"AB", "AB", "CD", "CD", "BA", "BA"},
                           Modality::kSmiles, 5);
  EXPECT_EQ(w.merges()[0], (Merge{"A", "B"}));
}

TEST(TrainBpe, StopsWhenNoPairRepeats) {
  const auto v = train_bpe({"ABCD"}, Modality::kSmiles, 100);
  EXPECT_TRUE(v.merges().empty());
}

TEST(TrainBpe, ContractErrors) {
  EXPECT_THROW(train_bpe({}, Modality::kSmiles, 10), Error);
  EXPECT_THROW(train_bpe({"ABC"}, Modality::kSmiles, 2), Error);
  EXPECT_THROW(train_bpe({"x"}, Modality::kText, 255), Error);
}

TEST(TrainBpe, TextStartsFromAllBytes) {
  const auto v = train_bpe({"aaaa"}, Modality::kText, 257);
  EXPECT_EQ(v.alphabet().size(), 256u);
  EXPECT_EQ(v.size(), 257u);
  EXPECT_FALSE(v.has_unknown());
}

TEST(TrainBpe, ScientificReservesUnknown) {
  const auto v = train_bpe({"CCO"}, Modality::kSmiles, 2);
  EXPECT_EQ(v.size(), 3u);  // <unk>, C, O
  EXPECT_EQ(v.token(v.unknown_id()), std::string(kUnknownToken));
}

TEST(TrainBpe, MatchesBruteForceOracle) {
  std::mt19937_64 rng(3);
  const Symbols smiles_chars = {"C", "N", "O", "(", ")", "=", "1", "c"};
  const Symbols text_chars = {"a", "b", " ", "é", "日", "x"};
  for (int trial = 0; trial < 60; ++trial) {
    const bool text = trial % 2 == 1;
    const Modality m = text ? Modality::kText : Modality::kSmiles;
    std::vector<std::string> corpus;
    const int n = std::uniform_int_distribution<int>(1, 25)(rng);
    for (int i = 0; i < n; ++i) {
      std::string s = random_string(rng, text ? text_chars : smiles_chars, 30);
      if (s.empty()) s = "C";
      corpus.push_back(s);
    }
    std::set<std::string> chars;
    for (const auto& s : corpus) {
      for (const auto& c : initial_symbols(s, m)) chars.insert(c);
    }
    const std::size_t base = text ? 256 : chars.size();
    const std::size_t target = base + std::uniform_int_distribution<std::size_t>(0, 40)(rng);
    EXPECT_EQ(train_bpe(corpus, m, target).merges(), oracle_train(corpus, m, target))
        << "trial " << trial;
  }
}

TEST(TrainBpe, DeterministicAndOrderIndependent) {
  std::mt19937_64 rng(5);
  std::vector<std::string> corpus;
  for (int i = 0; i < 200; ++i) {
    corpus.push_back(random_string(rng, {"C", "O", "N", "(", ")", "1"}, 20) + "C");
  }
  const auto a = train_bpe(corpus, Modality::kSmiles, 60);
  const auto b = train_bpe(corpus, Modality::kSmiles, 60);
  EXPECT_EQ(a.merges(), b.merges());
  std::shuffle(corpus.begin(), corpus.end(), rng);
  EXPECT_EQ(train_bpe(corpus, Modality::kSmiles, 60).merges(), a.merges());
}

TEST(TrainBpe, LargerTargetOnlyAppendsMerges) {
  std::mt19937_64 rng(9);
  std::vector<std::string> corpus;
  for (int i = 0; i < 100; ++i) {
    corpus.push_back(random_string(rng, {"A", "C", "G", "T"}, 40) + "A");
  }
  std::vector<Merge> prev;
  for (std::size_t target = 4; target <= 80; target += 4) {
    const auto cur = train_bpe(corpus, Modality::kNucleotide, target).merges();
    ASSERT_GE(cur.size(), prev.size());
    EXPECT_TRUE(std::equal(prev.begin(), prev.end(), cur.begin())) << target;
    prev = cur;
  }
}

TEST(Vocabulary, GreedyMergeExample) {
  const auto v = Vocabulary::create(Modality::kSmiles, {"C"}, {{"C", "C"}});
  EXPECT_EQ(token_strings(v, "CCCC"), (Symbols{"CC", "CC"}));
  EXPECT_EQ(token_strings(v, "CCC"), (Symbols{"CC", "C"}));
}

TEST(Vocabulary, TokenizeMatchesBruteForce) {
  std::mt19937_64 rng(13);
  const Symbols alphabet = {"a", "b", "c"};
  for (int trial = 0; trial < 300; ++trial) {
    // Random merge list over existing tokens; repeats and joins that
    // collide with existing tokens are allowed.
    Symbols tokens = alphabet;
    std::vector<Merge> merges;
    const int k = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < k; ++i) {
      Merge m{tokens[rng() % tokens.size()], tokens[rng() % tokens.size()]};
      if (std::find(tokens.begin(), tokens.end(), m.joined()) == tokens.end()) {
        tokens.push_back(m.joined());
      }
      merges.push_back(m);
    }
    const auto v = Vocabulary::create(Modality::kSmiles, alphabet, merges);
    for (int j = 0; j < 20; ++j) {
      const std::string s = random_string(rng, alphabet, 32);
      EXPECT_EQ(token_strings(v, s), oracle_tokenize(v, s)) << s;
    }
  }
}

TEST(Vocabulary, PiecesCoverInput) {
  const auto v = Vocabulary::create(Modality::kText, byte_alphabet(),
                                    {{"\xc3", "\xa9"}, {"a", "b"}});
  const std::string s = "abéab";
  std::size_t cursor = 0;
  std::string rebuilt;
  for (const Piece& p : v.tokenize(s)) {
    EXPECT_EQ(p.begin, cursor);
    cursor = p.end;
    rebuilt += v.token(p.id);
  }
  EXPECT_EQ(cursor, s.size());
  EXPECT_EQ(rebuilt, s);
  EXPECT_EQ(v.tokenize(s).size(), 3u);
}

TEST(Vocabulary, UnknownCharactersAreCounted) {
  const auto v = Vocabulary::character_level(Modality::kSmiles, {"C", "O"});
  std::size_t unknown = 0;
  const auto pieces = v.tokenize("CZOé", &unknown);
  EXPECT_EQ(unknown, 2u);
  ASSERT_EQ(pieces.size(), 4u);
  EXPECT_EQ(pieces[1].id, v.unknown_id());
  EXPECT_EQ(pieces[3].begin, 3u);
  EXPECT_EQ(pieces[3].end, 5u);
}

TEST(Vocabulary, IdsAreDense) {
  const auto v = Vocabulary::create(Modality::kProtein, {"A", "K", "M"},
                                    {{"M", "K"}, {"MK", "A"}});
  EXPECT_EQ(v.size(), 6u);
  // Id 0 is the unknown token; the string "<unk>" itself does not map to it.
  EXPECT_FALSE(v.find(std::string(kUnknownToken)).has_value());
  for (TokenId id = 1; id < v.size(); ++id) {
    EXPECT_EQ(v.find(v.token(id)), id);
  }
}

TEST(Vocabulary, CreateRejectsBadInput) {
  EXPECT_THROW(Vocabulary::create(Modality::kSmiles, {"C"}, {{"C", "O"}}), Error);
  EXPECT_THROW(Vocabulary::create(Modality::kSmiles, {"C", "C"}, {}), Error);
  EXPECT_THROW(Vocabulary::create(Modality::kSmiles, {"CC"}, {}), Error);
  EXPECT_THROW(Vocabulary::create(Modality::kText, {"a"}, {}), Error);
}

}  // namespace
}  // namespace scitok
