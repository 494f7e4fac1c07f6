/*
 * Copyright 2026 The fecam Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace fecam {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain physical parameter.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Infeasible or malformed configuration (ladder guard, schema, sizes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A solver failed to converge. Never expected for valid inputs.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidWrite : public Error {
 public:
  using Error::Error;
};

/// Bad nucleotide in a sequence; `position` is the zero-based offset.
class EncodingError : public Error {
 public:
  EncodingError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class QueryError : public Error {
 public:
  using Error::Error;
};

}  // namespace fecam
