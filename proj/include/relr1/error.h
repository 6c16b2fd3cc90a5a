// Copyright 2026 The relr1 Authors.
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

#ifndef RELR1_ERROR_H_
#define RELR1_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace relr1 {

enum class ErrorCode {
  kInvalidArgument,
  kGroupTooSmall,
  kLengthMismatch,
  kEmptyGroundTruth,
  kNoSamples,
  kUnknownKind,
  kProvenanceMismatch,
  kMissingGroundTruth,
  kBadRecord,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Hard failures: precondition violations and unusable inputs. Malformed
// model output is never an Error; it is reported through diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace relr1

#endif  // RELR1_ERROR_H_
