/*
Copyright (c) 2026 The mhr Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mhr {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text that does not match the expected line format. Carries the
// 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The remaining errors may also originate from a specific input line; line 0
// means "not tied to a line".
class LineError : public Error {
 public:
  LineError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class RangeError : public LineError {
 public:
  using LineError::LineError;
  explicit RangeError(const std::string& what) : LineError(0, what) {}
};

class DimensionError : public LineError {
 public:
  using LineError::LineError;
  explicit DimensionError(const std::string& what) : LineError(0, what) {}
};

class ValueError : public LineError {
 public:
  using LineError::LineError;
};

class DuplicateError : public LineError {
 public:
  using LineError::LineError;
};

class CompletenessError : public LineError {
 public:
  using LineError::LineError;
  explicit CompletenessError(const std::string& what) : LineError(0, what) {}
};

// API misuse, e.g. inserting into a sealed map.
class UsageError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A query that cannot be answered against the given store.
class QueryError : public Error {
 public:
  using Error::Error;
};

// Frontier sizing that overflows the machine integer.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace mhr
