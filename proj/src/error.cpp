// Copyright 2026 The ettc Authors
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

#include "ettc/error.hpp"

namespace ettc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingObject: return "MissingObject";
    case ErrorCode::kDegenerateAnnotation: return "DegenerateAnnotation";
    case ErrorCode::kUndefined: return "Undefined";
    case ErrorCode::kTooFewPairs: return "TooFewPairs";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kUnmatchedImages: return "UnmatchedImages";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace ettc
