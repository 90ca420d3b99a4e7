// Copyright 2026 The riskbatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RISKBATCH_ERRORS_H_
#define RISKBATCH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace riskbatch {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (JSON syntax, missing keys, wrong value types).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad run configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The simulator reached a state its own invariants rule out.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskbatch

#endif  // RISKBATCH_ERRORS_H_
