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


// Segments a mixed document, encodes it with a SMILES BPE trained on a few
// molecules, and prints each token with the text it covers.

#include <cstdio>
#include <string>
#include <vector>

#include "scitok/scitok.hpp"

int main() {
  using namespace scitok;
  const std::vector<std::string> corpus = {
      "CC(=O)Oc1ccccc1C(=O)O", "CN1C=NC2=C1C(=O)N(C(=O)N2C)C", "c1ccccc1O",
      "CC(C)Cc1ccc(cc1)C(C)C(=O)O", "CCO", "CC(=O)Nc1ccc(O)cc1"};
  const auto smiles = Vocabulary::create(
      Modality::kSmiles, default_alphabet(Modality::kSmiles),
      train_bpe(corpus, Modality::kSmiles, 60).merges());
  const auto vs = VocabularySet::character_level().with(smiles);

  const std::string doc =
      "Aspirin is <SMILES>CC(=O)Oc1ccccc1C(=O)O</SMILES>; the primer "
      "ACGTACGTTAGC binds upstream.";
  const auto seg = segment(doc, DetectorConfig{});
  for (const Span& s : seg.spans) {
    std::printf("span [%zu,%zu) %s %s\n", s.start, s.end,
                std::string(to_string(s.modality)).c_str(), s.tag ? "tag" : "");
  }

  const auto ts = encode(seg, vs);
  const utf8::Index index(doc);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto [a, b] = ts.alignments[i];
    const std::size_t from = index.byte_offset(a);
    std::printf("%6u  %s\n", ts.ids[i],
                doc.substr(from, index.byte_offset(b) - from).c_str());
  }
  std::printf("chars %zu tokens %zu round-trip %s\n", utf8::scalar_count(doc), ts.size(),
              decode(ts, vs) == doc ? "ok" : "FAILED");
}
