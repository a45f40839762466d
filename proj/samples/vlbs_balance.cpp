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


// Packs lognormal document lengths, then compares per-step rank imbalance
// with and without window sorting.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "scitok/packer.hpp"

int main(int argc, char** argv) {
  using namespace scitok;
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 0;
  constexpr std::uint64_t kCapacity = 16384;
  constexpr std::size_t kRanks = 8;

  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> dist(6.0, 1.0);
  std::vector<Document> docs;
  for (int i = 0; i < 4000; ++i) {
    const auto l = static_cast<std::uint64_t>(std::llround(dist(rng)));
    docs.push_back({std::to_string(i), std::clamp<std::uint64_t>(l, 1, kCapacity)});
  }

  for (auto model : {CostModel::kPaddedMax, CostModel::kQuadraticAttention}) {
    const auto plan = make_plan(docs, kCapacity, kRanks, seed, model);
    const auto sorted = simulate_ranks(plan, kRanks);
    const auto plain =
        simulate_ranks(make_plan(docs, kCapacity, kRanks, seed, model, false), kRanks);
    std::printf("%-10s buckets %zu  imbalance %.3f -> %.3f (max %.3f -> %.3f)\n",
                std::string(to_string(model)).c_str(), plan.buckets.size(),
                plain.mean_imbalance, sorted.mean_imbalance, plain.max_imbalance,
                sorted.max_imbalance);
  }
}
