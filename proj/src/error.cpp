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

#include "lrc/error.hpp"

namespace lrc {

const char* to_string(StreamErrc code) {
  switch (code) {
    case StreamErrc::kTruncated: return "truncated";
    case StreamErrc::kBadMagic: return "bad magic";
    case StreamErrc::kVersionMismatch: return "version mismatch";
    case StreamErrc::kHeaderCorrupt: return "header corrupt";
    case StreamErrc::kCorruptPayload: return "corrupt payload";
    case StreamErrc::kTrailingData: return "trailing data";
    case StreamErrc::kShapeMismatch: return "shape mismatch";
    case StreamErrc::kChecksumMismatch: return "checksum mismatch";
  }
  return "unknown";
}

StreamError::StreamError(StreamErrc code, std::size_t offset,
                         const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + " at byte " +
                         std::to_string(offset) + ": " + what),
      code_(code),
      offset_(offset) {}

}  // namespace lrc
