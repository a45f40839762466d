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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scitok {

enum class ErrorCode {
  kMalformedTag,
  kInvalidUtf8,
  kInvalidId,
  kOversizeDocument,
  kEmptyInput,
  kContract,
  kFormat,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedTag: return "malformed_tag";
    case ErrorCode::kInvalidUtf8: return "invalid_utf8";
    case ErrorCode::kInvalidId: return "invalid_id";
    case ErrorCode::kOversizeDocument: return "oversize_document";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kContract: return "contract_violation";
    case ErrorCode::kFormat: return "format_error";
  }
  return "unknown";
}

// Every failure raised by the library. `position` is a character offset for
// text errors, a token index for id errors, and unset otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(message), code_(code), position_(position) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
};

}  // namespace scitok
