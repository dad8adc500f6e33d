// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvgr {

// Stable machine-readable error categories. The CLI prints the name and maps
// each category to its own exit status.
enum class ErrorCode {
  kIo = 1,
  kParse,
  kDuplicateId,
  kFormat,
  kChecksum,
  kVocabularyMismatch,
  kInvalidArgument,
  kExists,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mvgr
