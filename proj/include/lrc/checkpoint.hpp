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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrc/model.hpp"

namespace lrc::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Training provenance stored next to the weights.
struct CheckpointMeta {
  std::int64_t step = 0;                  // optimizer steps taken so far
  std::vector<int> stage_frames;          // clip length of each completed stage
  std::vector<std::int64_t> stage_ends;   // global step at each stage end
  double train_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string note;

  friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

/// "LRCK" | u32 version | u32 n | n bytes JSON (config, meta) | u32 count |
/// count x (u16 name length, name, u8 rank, rank x u32 dims, f32 LE data) |
/// u32 CRC-32 of all preceding bytes. Big-endian integers.
std::vector<std::uint8_t> serialize_checkpoint(CodecImpl& codec, const CheckpointMeta& meta);

struct LoadedCheckpoint {
  Codec codec{nullptr};
  CheckpointMeta meta;
};

/// Throws StreamError on bad magic, version mismatch, checksum mismatch or
/// truncation; ConfigError if the embedded config is invalid.
LoadedCheckpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::string& path, CodecImpl& codec, const CheckpointMeta& meta);
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace lrc::model
