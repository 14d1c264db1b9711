// Copyright 2026 The twinbench Authors.
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

#ifndef TWINBENCH_ERROR_HPP_
#define TWINBENCH_ERROR_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace twinbench {

enum class ErrorCode {
  kInvalidArgument,
  // persona-core
  kOutOfRange,
  kUnknownEnumValue,
  kMalformedValue,
  kMissingRequiredField,
  kMissingGoldResponse,
  kEmptyResponse,
  // gateways
  kProviderError,
  kRateLimited,
  kReplayMiss,
  kTimeout,
  kEmptyText,
  kTextTooLong,
  // metrics
  kZeroVector,
  kModelMismatch,
  kLengthMismatch,
  kTooFewPairs,
  kDegenerateLabels,
  // fairness
  kEmptyGroup,
  kZeroPrivilegedRate,
  kNoValidCombination,
  kUnmappableValue,
  // store / cli
  kUnreadableFile,
  kSchemaMismatch,
  kUnknownRun,
  kUnparsableRating,
  kCorpusChanged,
};

// Stable identifier used in reject files, logs and machine-readable errors.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Captured per-item failure for batch operations that must not abort.
struct Failure {
  ErrorCode code;
  std::string message;

  bool operator==(const Failure&) const = default;
};

// Either a value or the failure that prevented it.
template <typename T>
struct Outcome {
  std::optional<T> value;
  std::optional<Failure> failure;

  bool ok() const { return value.has_value(); }
};

}  // namespace twinbench

#endif  // TWINBENCH_ERROR_HPP_
