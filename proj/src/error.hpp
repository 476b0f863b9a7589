// Copyright 2026 The Slid Authors.
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

#ifndef SLID_ERROR_HPP_
#define SLID_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace slid {

// Error categories carried by every exception thrown from the core.
// The C API and the CLI map these onto status / exit codes.
enum class ErrorCode {
  kOk = 0,
  kInvalidInput,    // bad caller-provided data (empty audio, length mismatch, ...)
  kConfig,          // config / weight-shape inconsistency
  kModel,           // container problems: magic, version, checksum
  kUsage,           // API misuse (uninitialized state, ...)
  kDegenerateData,  // training data that cannot be learned from
  kNotFound,        // missing tensor / file entry
  kIo,              // filesystem read/write failures
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void ThrowInvalidInput(const std::string& what) {
  throw Error(ErrorCode::kInvalidInput, what);
}

[[noreturn]] inline void ThrowConfig(const std::string& what) {
  throw Error(ErrorCode::kConfig, what);
}

[[noreturn]] inline void ThrowModel(const std::string& what) {
  throw Error(ErrorCode::kModel, what);
}

}  // namespace slid

#endif  // SLID_ERROR_HPP_
