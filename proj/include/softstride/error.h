// Copyright 2026 The softstride Authors.
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

#ifndef SOFTSTRIDE_ERROR_H_
#define SOFTSTRIDE_ERROR_H_

#include <stdexcept>
#include <string>

namespace softstride {

enum class ErrorCode {
  kInvalidArgument,
  kNotSkewSymmetric,
  kDegenerateMatrix,
  kSingularJacobian,
  kNoMeasurements,
  kInsufficientHistory,
  kCovarianceNotPD,
  kOutOfRegion,
  kNumericalInstability,
  kSchemaMismatch,
  kNonMonotonicTime,
  kParseError,
  kEmptyOverlap,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, long line = -1)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code),
        line_(line) {}

  ErrorCode code() const { return code_; }
  // source line for kParseError, -1 otherwise
  long line() const { return line_; }

 private:
  ErrorCode code_;
  long line_;
};

}  // namespace softstride

#endif  // SOFTSTRIDE_ERROR_H_
