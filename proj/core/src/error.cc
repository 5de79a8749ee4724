/*
 * Copyright 2026 The ope-shrink Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ope/error.h"

namespace ope {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kAbsoluteContinuityViolation:
      return "AbsoluteContinuityViolation";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kInvalidSoftening: return "InvalidSoftening";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kZeroWeightScheme: return "ZeroWeightScheme";
    case ErrorCode::kDegenerateWeights: return "DegenerateWeights";
    case ErrorCode::kDuplicateItem: return "DuplicateItem";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kSpanViolation: return "SpanViolation";
    case ErrorCode::kZeroPropensity: return "ZeroPropensity";
    case ErrorCode::kBadFractions: return "BadFractions";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

OpeError::OpeError(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

void Fail(ErrorCode code, const std::string& message) {
  throw OpeError(code, message);
}

}  // namespace ope
