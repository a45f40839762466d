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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scitok/error.hpp"

namespace scitok::utf8 {

// Length in bytes of the well-formed sequence starting at `pos`, or 0 if the
// bytes there are not valid UTF-8 (overlongs, surrogates and values above
// U+10FFFF are rejected).
inline std::size_t sequence_length(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) {
    return pos + i < s.size() &&
           (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
  };
  if (b0 < 0x80) return 1;
  if (b0 < 0xC2) return 0;
  if (b0 < 0xE0) return cont(1) ? 2 : 0;
  if (b0 < 0xF0) {
    if (!cont(1) || !cont(2)) return 0;
    const auto b1 = static_cast<unsigned char>(s[pos + 1]);
    if (b0 == 0xE0 && b1 < 0xA0) return 0;
    if (b0 == 0xED && b1 >= 0xA0) return 0;
    return 3;
  }
  if (b0 < 0xF5) {
    if (!cont(1) || !cont(2) || !cont(3)) return 0;
    const auto b1 = static_cast<unsigned char>(s[pos + 1]);
    if (b0 == 0xF0 && b1 < 0x90) return 0;
    if (b0 == 0xF4 && b1 >= 0x90) return 0;
    return 4;
  }
  return 0;
}

inline bool is_valid(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const std::size_t n = sequence_length(s, i);
    if (n == 0) return false;
    i += n;
  }
  return true;
}

// Number of Unicode scalar values. Throws on malformed input.
inline std::size_t scalar_count(std::string_view s) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size(); ++count) {
    const std::size_t n = sequence_length(s, i);
    if (n == 0) {
      throw Error(ErrorCode::kInvalidUtf8, "invalid UTF-8 sequence", count);
    }
    i += n;
  }
  return count;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Splits a valid UTF-8 string into one std::string per scalar value.
inline std::vector<std::string> split_scalars(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const std::size_t n = sequence_length(s, i);
    if (n == 0) {
      throw Error(ErrorCode::kInvalidUtf8, "invalid UTF-8 sequence",
                  out.size());
    }
    out.emplace_back(s.substr(i, n));
    i += n;
  }
  return out;
}

// Maps between byte offsets and scalar offsets of one validated string.
class Index {
 public:
  explicit Index(std::string_view s) : byte_size_(s.size()) {
    starts_.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
      const std::size_t n = sequence_length(s, i);
      if (n == 0) {
        throw Error(ErrorCode::kInvalidUtf8, "invalid UTF-8 sequence",
                    starts_.size());
      }
      starts_.push_back(i);
      i += n;
    }
  }

  std::size_t size() const noexcept { return starts_.size(); }

  std::size_t byte_offset(std::size_t scalar) const {
    return scalar < starts_.size() ? starts_[scalar] : byte_size_;
  }

  // Index of the first scalar whose first byte is at or after `byte`.
  std::size_t scalar_at_or_after(std::size_t byte) const {
    return static_cast<std::size_t>(
        std::lower_bound(starts_.begin(), starts_.end(), byte) -
        starts_.begin());
  }

 private:
  std::vector<std::size_t> starts_;
  std::size_t byte_size_;
};

}  // namespace scitok::utf8
