// Copyright 2026 The liftsim Authors.
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

#ifndef LIFTSIM_ERROR_HPP_
#define LIFTSIM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace liftsim {

// Numeric values double as CLI exit codes and C API status codes.
enum class ErrorCode : int {
  kInternal = 1,
  kConfig = 2,
  kIo = 3,
  kNumeric = 4,
  kTruncated = 5,
  kIllegalAction = 6,
  kInvalidArgument = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

// Malformed input data. Reported with a 1-based line and column (field).
class ParseError : public Error {
 public:
  ParseError(const std::string& detail, std::size_t line, std::size_t column,
             const std::string& source = {})
      : Error(ErrorCode::kIo, (source.empty() ? std::string() : source + ": ") +
                                  "line " + std::to_string(line) + ", column " +
                                  std::to_string(column) + ": " + detail),
        detail_(detail),
        line_(line),
        column_(column) {}
  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

// Non-finite values in training. `payload` optionally carries a JSON dump of
// the data that produced them so the failure can be replayed.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, std::string payload = {})
      : Error(ErrorCode::kNumeric, what), payload_(std::move(payload)) {}
  const std::string& payload() const noexcept { return payload_; }

 private:
  std::string payload_;
};

class IllegalAction : public Error {
 public:
  explicit IllegalAction(const std::string& what)
      : Error(ErrorCode::kIllegalAction, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

}  // namespace liftsim

#endif  // LIFTSIM_ERROR_HPP_
