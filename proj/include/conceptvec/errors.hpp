// Copyright 2026 The conceptvec Authors. All Rights Reserved.
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

namespace conceptvec {

/// Base for every data, format or numerical failure raised by the library.
/// The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(format(source, line, what)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line,
                            const std::string& what) {
    std::string out = source.empty() ? std::string("input") : source;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + what;
  }

  std::size_t line_;
};

/// Raised when SGD produces a non-finite value.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

}  // namespace conceptvec
