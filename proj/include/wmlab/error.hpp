// Copyright 2026 The wmlab Authors
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

#ifndef WMLAB_ERROR_HPP_
#define WMLAB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace wmlab {

enum class ErrorCode {
  kMalformedFile = 1,
  kUnsupportedFormat,
  kDimensionMismatch,
  kInvalidParameter,
  kImageTooSmall,
  kNonSquare,
  kDegenerateVariance,
  kEmptyCandidates,
  kFullMask,
  kEmptyMask,
  kEmptyInput,
  kBackendFailure,
  kConfigError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

/// Exception carrying one of the library's error kinds. Every public
/// operation reports failure by throwing this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Failure of an external or built-in attack stage; `stage()` names it.
class BackendFailure : public Error {
 public:
  BackendFailure(std::string stage, const std::string& message)
      : Error(ErrorCode::kBackendFailure, stage + ": " + message),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace wmlab

#endif  // WMLAB_ERROR_HPP_
