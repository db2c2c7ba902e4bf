// Copyright 2026 The MIENF Authors.
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

#include <stdexcept>
#include <string>

namespace mienf {

// Mirrors mienf_status_t in the C API; keep the numeric values in sync.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kShapeMismatch = 2,
  kNotPositiveDefinite = 3,
  kNoConvergence = 4,
  kDomainError = 5,
  kNonFinite = 6,
  kStaleTape = 7,
  kInsufficientSamples = 8,
  kTargetBelowCorrection = 9,
  kUnsupportedFamily = 10,
  kIoError = 11,
  kParseError = 12,
  kInternal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) raise(code, what);
}

}  // namespace mienf
