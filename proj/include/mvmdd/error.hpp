// include/mvmdd/error.hpp
//
// Copyright 2026  The mvmdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MVMDD_ERROR_HPP_
#define MVMDD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mvmdd {

// Root of every error the library raises. The CLI maps the subclasses onto
// exit codes (2 config/usage, 3 numerical, 4 I/O).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input. row() is 1-based, 0 when not row oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int row = 0)
      : Error(row > 0 ? "row " + std::to_string(row) + ": " + what : what),
        row_(row) {}
  // Re-raise with a location prefix (file name), keeping the row.
  ParseError(const std::string& prefix, const ParseError& inner)
      : Error(prefix + ": " + inner.what()), row_(inner.row()) {}
  int row() const { return row_; }

 private:
  int row_;
};

// Well-formed input that violates a domain rule (unknown phone, bad shape...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A CTC target that no frame path can produce.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Binary container problems: bad magic, truncation, overflow.
class FormatError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf where a finite value is required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mvmdd

#endif  // MVMDD_ERROR_HPP_
