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

#ifndef ANCHOR_MOTION_ERROR_H_
#define ANCHOR_MOTION_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace anchor_motion {

enum class ErrorCode {
  kFormat,       // Wrong magic, version or header syntax.
  kCorruption,   // Payload size disagrees with the header.
  kValidation,   // Value or shape violates a documented invariant.
  kIo,           // Filesystem failure.
  kEmptyResult,  // A pipeline stage produced nothing to work with.
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets callers (notably the CLI) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_ERROR_H_
