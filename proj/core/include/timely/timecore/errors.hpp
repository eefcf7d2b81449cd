// Copyright 2026 The Timely Authors.
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

namespace timely {

// Root of every error the harness raises. Callers that only need to report
// failures can catch this; finer handling catches the subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class AlreadyRegistered : public Error {
 public:
  using Error::Error;
};

class NotRegistered : public Error {
 public:
  using Error::Error;
};

class GameOver : public Error {
 public:
  using Error::Error;
};

// Malformed input document. `location` is a byte offset for single
// documents or a 1-based line number for line-oriented files.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}
  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::size_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised by a policy (or its transport) when it cannot produce a turn.
// The session converts it into a policy_error termination.
class PolicyError : public Error {
 public:
  using Error::Error;
};

}  // namespace timely
