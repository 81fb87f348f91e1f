// Copyright 2026 The SpanSteer Authors.
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

#ifndef SPANSTEER_ERROR_H_
#define SPANSTEER_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace spansteer {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record or broken data-type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration (k < 1, unknown span type, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A pluggable model component failed or could not be reached.
class AdapterError : public Error {
 public:
  AdapterError(std::string component, const std::string& what)
      : Error(component + ": " + what), component_(std::move(component)) {}

  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

// A pipeline stage needs a checkpoint that does not exist.
class CheckpointError : public Error {
 public:
  CheckpointError(std::string stage, const std::string& path)
      : Error(stage + " checkpoint not found: " + path), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace spansteer

#endif  // SPANSTEER_ERROR_H_
