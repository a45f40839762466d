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

// Variable-length balanced batching.
//
// 1. pack: visit documents in a seeded random order and fill buckets of a
//    fixed token capacity, recording each bucket's longest document.
// 2. window_sort: tile the bucket list into windows of S buckets.
// 3. sort each window by max length (ascending, stable).
//
// When every data-parallel rank walks its own windows in order, ranks reach
// buckets of similar max length on the same step. simulate_ranks measures
// the resulting per-step load imbalance.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "scitok/error.hpp"

namespace scitok {

enum class CostModel {
  kPaddedMax,           // max_len * number of documents
  kQuadraticAttention,  // sum of length^2
};

inline std::string_view to_string(CostModel m) {
  return m == CostModel::kPaddedMax ? "padded-max" : "quad-attn";
}

inline CostModel cost_model_from_string(std::string_view s) {
  if (s == "padded-max") return CostModel::kPaddedMax;
  if (s == "quad-attn") return CostModel::kQuadraticAttention;
  throw Error(ErrorCode::kFormat, "unknown cost model '" + std::string(s) + "'");
}

enum class RankAssignment {
  // Window k belongs to rank k mod R; each rank consumes its windows in
  // order, one bucket per step.
  kWindowStreams,
  // Step t takes buckets [t*R, (t+1)*R), one per rank.
  kStriped,
};

struct Document {
  std::string id;
  std::uint64_t length = 0;
};

struct Bucket {
  std::vector<std::string> doc_ids;
  std::vector<std::uint64_t> lengths;  // parallel to doc_ids
  std::uint64_t used = 0;
  std::uint64_t capacity = 0;
  std::uint64_t max_len = 0;

  bool operator==(const Bucket&) const = default;
};

struct PackingPlan {
  std::vector<Bucket> buckets;
  std::size_t window = 1;
  std::uint64_t seed = 0;
  CostModel cost_model = CostModel::kPaddedMax;
  std::uint64_t capacity = 0;
};

namespace packer_detail {

// Uniform integer in [0, bound) from a 64-bit engine by rejection, so the
// sequence is the same on every standard library.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace packer_detail

/// Seeded Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> seeded_permutation(std::size_t n,
                                                   std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(packer_detail::uniform_below(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

/// Visits documents in a seeded random order and appends each to the open
/// bucket, opening a new one when it does not fit.
inline std::vector<Bucket> pack(const std::vector<Document>& docs,
                                std::uint64_t capacity, std::uint64_t seed) {
  if (docs.empty()) throw Error(ErrorCode::kEmptyInput, "pack: no documents");
  if (capacity == 0) throw Error(ErrorCode::kContract, "pack: capacity is 0");
  for (const auto& d : docs) {
    if (d.length == 0) {
      throw Error(ErrorCode::kContract,
                  "pack: document '" + d.id + "' has length 0");
    }
    if (d.length > capacity) {
      throw Error(ErrorCode::kOversizeDocument,
                  "pack: document '" + d.id + "' has length " +
                      std::to_string(d.length) + " > capacity " +
                      std::to_string(capacity));
    }
  }

  std::vector<Bucket> buckets;
  Bucket open;
  open.capacity = capacity;
  for (std::size_t i : seeded_permutation(docs.size(), seed)) {
    const Document& d = docs[i];
    if (open.used + d.length > capacity) {
      buckets.push_back(std::move(open));
      open = Bucket{};
      open.capacity = capacity;
    }
    open.doc_ids.push_back(d.id);
    open.lengths.push_back(d.length);
    open.used += d.length;
    open.max_len = std::max(open.max_len, d.length);
  }
  buckets.push_back(std::move(open));
  return buckets;
}

/// Sorts each consecutive group of `window` buckets by max_len, ascending and
/// stable. The last group may be shorter.
inline std::vector<Bucket> window_sort(std::vector<Bucket> buckets,
                                       std::size_t window) {
  if (window == 0) throw Error(ErrorCode::kContract, "window_sort: S must be >= 1");
  for (std::size_t b = 0; b < buckets.size(); b += window) {
    const auto first = buckets.begin() + static_cast<std::ptrdiff_t>(b);
    const auto last =
        buckets.begin() +
        static_cast<std::ptrdiff_t>(std::min(b + window, buckets.size()));
    std::stable_sort(first, last, [](const Bucket& x, const Bucket& y) {
      return x.max_len < y.max_len;
    });
  }
  return buckets;
}

inline PackingPlan make_plan(const std::vector<Document>& docs,
                             std::uint64_t capacity, std::size_t window,
                             std::uint64_t seed, CostModel cost_model,
                             bool sort_windows = true) {
  PackingPlan plan;
  plan.buckets = pack(docs, capacity, seed);
  if (sort_windows) plan.buckets = window_sort(std::move(plan.buckets), window);
  plan.window = window;
  plan.seed = seed;
  plan.cost_model = cost_model;
  plan.capacity = capacity;
  return plan;
}

inline std::uint64_t bucket_cost(const Bucket& b, CostModel model) {
  if (model == CostModel::kPaddedMax) {
    return b.max_len * static_cast<std::uint64_t>(b.lengths.size());
  }
  std::uint64_t sum = 0;
  for (std::uint64_t l : b.lengths) sum += l * l;
  return sum;
}

struct BalanceStats {
  std::size_t num_ranks = 0;
  std::size_t steps = 0;
  double mean_imbalance = 0.0;
  double max_imbalance = 0.0;
  std::vector<double> step_imbalance;
  std::vector<std::uint64_t> rank_cost;  // total cost per rank
};

/// Replays the plan on `num_ranks` data-parallel workers. A step's imbalance
/// is max rank cost / mean rank cost over the ranks that got a bucket in that
/// step (a trailing step may be partial).
inline BalanceStats simulate_ranks(
    const PackingPlan& plan, std::size_t num_ranks,
    RankAssignment assignment = RankAssignment::kWindowStreams) {
  if (num_ranks == 0) {
    throw Error(ErrorCode::kContract, "simulate_ranks: num_ranks must be >= 1");
  }
  // streams[r] = bucket indices consumed by rank r, in order.
  std::vector<std::vector<std::size_t>> streams(num_ranks);
  const std::size_t n = plan.buckets.size();
  if (assignment == RankAssignment::kStriped) {
    for (std::size_t i = 0; i < n; ++i) streams[i % num_ranks].push_back(i);
  } else {
    const std::size_t window = std::max<std::size_t>(plan.window, 1);
    for (std::size_t i = 0; i < n; ++i) {
      streams[(i / window) % num_ranks].push_back(i);
    }
  }

  BalanceStats stats;
  stats.num_ranks = num_ranks;
  stats.rank_cost.assign(num_ranks, 0);
  std::size_t steps = 0;
  for (const auto& s : streams) steps = std::max(steps, s.size());
  std::vector<std::uint64_t> costs;
  for (std::size_t t = 0; t < steps; ++t) {
    costs.clear();
    for (std::size_t r = 0; r < num_ranks; ++r) {
      if (t >= streams[r].size()) continue;
      const std::uint64_t c =
          bucket_cost(plan.buckets[streams[r][t]], plan.cost_model);
      costs.push_back(c);
      stats.rank_cost[r] += c;
    }
    const double max = static_cast<double>(*std::max_element(costs.begin(), costs.end()));
    const double mean =
        static_cast<double>(std::accumulate(costs.begin(), costs.end(), std::uint64_t{0})) /
        static_cast<double>(costs.size());
    stats.step_imbalance.push_back(max / mean);
  }
  stats.steps = steps;
  if (steps > 0) {
    stats.mean_imbalance =
        std::accumulate(stats.step_imbalance.begin(), stats.step_imbalance.end(), 0.0) /
        static_cast<double>(steps);
    stats.max_imbalance =
        *std::max_element(stats.step_imbalance.begin(), stats.step_imbalance.end());
  }
  return stats;
}

}  // namespace scitok
