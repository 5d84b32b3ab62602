/*
 * Copyright 2026 The lexalign Authors.
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

#ifndef LEXALIGN_ERROR_HPP_
#define LEXALIGN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lexalign {

// Domain errors are bad inputs or degenerate data; Io errors are missing or
// unreadable files. The CLI maps them to exit codes 1 and 2.
enum class ErrorKind { kDomain, kIo };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(const std::string& message) {
  throw Error(ErrorKind::kDomain, message);
}

[[noreturn]] inline void FailIo(const std::string& message) {
  throw Error(ErrorKind::kIo, message);
}

}  // namespace lexalign

#endif  // LEXALIGN_ERROR_HPP_
