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

#include "twinbench/error.hpp"

namespace twinbench {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kUnknownEnumValue: return "UnknownEnumValue";
    case ErrorCode::kMalformedValue: return "MalformedValue";
    case ErrorCode::kMissingRequiredField: return "MissingRequiredField";
    case ErrorCode::kMissingGoldResponse: return "MissingGoldResponse";
    case ErrorCode::kEmptyResponse: return "EmptyResponse";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kReplayMiss: return "ReplayMiss";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kTextTooLong: return "TextTooLong";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kModelMismatch: return "ModelMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooFewPairs: return "TooFewPairs";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kZeroPrivilegedRate: return "ZeroPrivilegedRate";
    case ErrorCode::kNoValidCombination: return "NoValidCombination";
    case ErrorCode::kUnmappableValue: return "UnmappableValue";
    case ErrorCode::kUnreadableFile: return "UnreadableFile";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kUnknownRun: return "UnknownRun";
    case ErrorCode::kUnparsableRating: return "UnparsableRating";
    case ErrorCode::kCorpusChanged: return "CorpusChanged";
  }
  return "Unknown";
}

}  // namespace twinbench
