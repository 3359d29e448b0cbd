// Copyright 2026 The Anchor Motion Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anchor_motion/error.h"

namespace anchor_motion {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFormat:
      return "format error";
    case ErrorCode::kCorruption:
      return "corruption error";
    case ErrorCode::kValidation:
      return "validation error";
    case ErrorCode::kIo:
      return "I/O error";
    case ErrorCode::kEmptyResult:
      return "empty result";
  }
  return "error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace anchor_motion
