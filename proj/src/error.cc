// Copyright 2026 The Posterlay Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "posterlay/error.h"

namespace posterlay {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kMalformedStyle: return "MalformedStyle";
    case ErrorCode::kNoElements: return "NoElements";
    case ErrorCode::kEmptyReferenceSet: return "EmptyReferenceSet";
    case ErrorCode::kEmptyCategorySet: return "EmptyCategorySet";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kMissingDirectory: return "MissingDirectory";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kTooFewRecords: return "TooFewRecords";
    case ErrorCode::kZeroNormEmbedding: return "ZeroNormEmbedding";
    case ErrorCode::kNonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::kDivergenceDetected: return "DivergenceDetected";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kEmptyConstraints: return "EmptyConstraints";
    case ErrorCode::kUnknownCandidateId: return "UnknownCandidateId";
    case ErrorCode::kPoolTooSmall: return "PoolTooSmall";
    case ErrorCode::kNoExemplars: return "NoExemplars";
    case ErrorCode::kMissingConstraints: return "MissingConstraints";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kAllCandidatesUnparseable: return "AllCandidatesUnparseable";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kNotFound: return "NotFound";
  }
  return "Unknown";
}

}  // namespace posterlay
