// Copyright 2026 The omvid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace omvid {

// Error taxonomy. The CLI maps ValidationError/FormatError to exit code 1 and
// ConfigError (and subclasses) to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Raised when an internal invariant of a data structure is violated, e.g. a
// label that indexes past the cluster table.
class InvariantError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ParameterError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace omvid
