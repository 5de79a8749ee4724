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

#ifndef OPE_ERROR_H_
#define OPE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ope {

enum class ErrorCode {
  kInvalidArgument,
  kAbsoluteContinuityViolation,
  kNonConvergence,
  kInvalidSoftening,
  kSingularSystem,
  kEmptyDataset,
  kTooFewSamples,
  kZeroWeightScheme,
  kDegenerateWeights,
  kDuplicateItem,
  kIndexOutOfRange,
  kRankDeficient,
  kSpanViolation,
  kZeroPropensity,
  kBadFractions,
  kLengthMismatch,
  kNonFiniteObjective,
  kIoError,
  kParseError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets callers (notably the CLI) map failures onto exit statuses.
class OpeError : public std::runtime_error {
 public:
  OpeError(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace ope

#endif  // OPE_ERROR_H_
