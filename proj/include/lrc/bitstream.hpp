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
#include <vector>

namespace lrc::entropy {

/// Container layout (big-endian):
///   "LRCV" | version u8 | flags u8 | width u16 | height u16 |
///   frame count u16 | level count u8 | check u8
/// then per frame: qmap length u32 + payload, and per level: length u32 +
/// range-coded payload. flags bit0 marks a signaled quality map; the other
/// bits must be zero. check is CRC-8 (poly 0x07) over the first 13 bytes.
inline constexpr std::uint8_t kBitstreamVersion = 1;
inline constexpr std::size_t kHeaderBytes = 14;

struct FramePayload {
  std::vector<std::uint8_t> qmap;
  std::vector<std::vector<std::uint8_t>> levels;

  friend bool operator==(const FramePayload&, const FramePayload&) = default;
};

struct Bitstream {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint8_t level_count = 0;
  bool qmap_signaled = true;
  std::vector<FramePayload> frames;

  friend bool operator==(const Bitstream&, const Bitstream&) = default;
};

std::vector<std::uint8_t> pack_bitstream(const Bitstream& stream);
/// Throws StreamError (bad magic, version, header check, truncation,
/// trailing bytes) with the failing byte offset.
Bitstream unpack_bitstream(std::span<const std::uint8_t> bytes);

/// CRC-8 with polynomial 0x07, zero init.
std::uint8_t crc8(std::span<const std::uint8_t> bytes);

}  // namespace lrc::entropy
