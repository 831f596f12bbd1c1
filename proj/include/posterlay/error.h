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
#ifndef POSTERLAY_ERROR_H_
#define POSTERLAY_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace posterlay {

// Machine-readable error kinds. The names double as the wire codes returned
// by the HTTP service, so renaming one is a protocol change.
enum class ErrorCode {
  kUnknownCategory,
  kMalformedStyle,
  kNoElements,
  kEmptyReferenceSet,
  kEmptyCategorySet,
  kEmptyInput,
  kLengthMismatch,
  kDegenerateInput,
  kMissingDirectory,
  kEmptyCorpus,
  kConfigError,
  kTooFewRecords,
  kZeroNormEmbedding,
  kNonPositiveTemperature,
  kDivergenceDetected,
  kEmptyIndex,
  kEmptyConstraints,
  kUnknownCandidateId,
  kPoolTooSmall,
  kNoExemplars,
  kMissingConstraints,
  kProviderError,
  kAllCandidatesUnparseable,
  kEmptyCandidates,
  kInvalidArgument,
  kIoError,
  kNotFound,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace posterlay

#endif  // POSTERLAY_ERROR_H_
