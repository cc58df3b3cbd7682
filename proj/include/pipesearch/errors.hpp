// Copyright 2026 The pipesearch Authors.
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
#include <vector>

namespace pipesearch {

// An invariant or schema violation, addressed by a field path.
struct Violation {
  std::string path;
  std::string message;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SearchSpaceError : public Error {
 public:
  using Error::Error;
};

// Raised by canonical_decode; `position` is the byte offset of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class FitError : public Error {
 public:
  FitError(const std::string& message, std::size_t step, std::string component)
      : Error(message), step_(step), component_(std::move(component)) {}
  std::size_t step() const { return step_; }
  const std::string& component() const { return component_; }

 private:
  std::size_t step_;
  std::string component_;
};

// Invalid run configuration; carries every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<Violation> violations)
      : Error(summarize(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& v) {
    std::string out = "invalid configuration";
    for (const auto& x : v) out += "; " + x.path + ": " + x.message;
    return out;
  }
  std::vector<Violation> violations_;
};

class LogError : public Error {
 public:
  using Error::Error;
};

}  // namespace pipesearch
