// Copyright 2026 The LRC Video Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
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

namespace lrc {

/// Bad argument or precondition violation on a public entry point.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration files, CLI options, dataset layout.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the training loop on a non-finite loss.
class TrainingAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure outside training (e.g. diverging map optimization).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StreamErrc {
  kTruncated,
  kBadMagic,
  kVersionMismatch,
  kHeaderCorrupt,
  kCorruptPayload,
  kTrailingData,
  kShapeMismatch,
  kChecksumMismatch,
};

const char* to_string(StreamErrc code);

/// Failure while parsing a bitstream, payload or checkpoint. Carries the
/// byte offset at which parsing stopped.
class StreamError : public std::runtime_error {
 public:
  StreamError(StreamErrc code, std::size_t offset, const std::string& what);

  StreamErrc code() const { return code_; }
  std::size_t offset() const { return offset_; }

 private:
  StreamErrc code_;
  std::size_t offset_;
};

}  // namespace lrc
