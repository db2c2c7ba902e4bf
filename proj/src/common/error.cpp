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

#include "common/error.hpp"

namespace mienf {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kStaleTape: return "StaleTape";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kTargetBelowCorrection: return "TargetBelowCorrection";
    case ErrorCode::kUnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace mienf
