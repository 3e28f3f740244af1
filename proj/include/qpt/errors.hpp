/*
 * Copyright 2026 The qpu-time Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
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

namespace qpt {

// Base class of every error raised by the library. The CLI maps each
// subclass onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad command-line usage or configuration. Exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that violates a record invariant or cannot be parsed. Exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed. Exit code 3.
class InvariantError : public Error {
 public:
  using Error::Error;
};

int exit_code_for(const std::exception& e) noexcept;

}  // namespace qpt
