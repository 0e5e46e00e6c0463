// Copyright 2026 The cricket_sort Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cricket_sort {

// Malformed input: bad token counts, unparsable numbers, broken JSON,
// out-of-order streams. The CLI maps this to exit code 2.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  // 1-based line number, or 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Frames or commands that arrive with a timestamp earlier than their
// predecessor.
class OrderError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Well-formed input whose content violates a contract (empty ground truth,
// invalid configuration values, unknown preset). Exit code 1.
class ContentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero-area or otherwise unusable boxes.
class InvalidGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cricket_sort
