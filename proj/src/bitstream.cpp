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

#include "lrc/bitstream.hpp"

#include <boost/crc.hpp>
#include <limits>
#include <string>

#include "lrc/error.hpp"

namespace lrc::entropy {
namespace {

constexpr std::uint8_t kMagic[4] = {'L', 'R', 'C', 'V'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v >> 8));
    u8(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  void blob(std::span<const std::uint8_t> b) {
    if (b.size() > std::numeric_limits<std::uint32_t>::max())
      throw InvalidInput("payload exceeds 4 GiB");
    u32(static_cast<std::uint32_t>(b.size()));
    out_.insert(out_.end(), b.begin(), b.end());
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint16_t u16() {
    const std::uint16_t hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }
  std::uint32_t u32() {
    const std::uint32_t hi = u16();
    return (hi << 16) | u16();
  }
  std::vector<std::uint8_t> blob() {
    const std::size_t at = pos_;
    const std::uint32_t len = u32();
    if (in_.size() - pos_ < len)
      throw StreamError(StreamErrc::kTruncated, at,
                        "payload declares " + std::to_string(len) + " bytes, " +
                            std::to_string(in_.size() - pos_) + " remain");
    std::vector<std::uint8_t> b(in_.begin() + pos_, in_.begin() + pos_ + len);
    pos_ += len;
    return b;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) {
    if (in_.size() - pos_ < n)
      throw StreamError(StreamErrc::kTruncated, pos_, "unexpected end of stream");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint8_t crc8(std::span<const std::uint8_t> bytes) {
  boost::crc_optimal<8, 0x07, 0, 0, false, false> crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::vector<std::uint8_t> pack_bitstream(const Bitstream& stream) {
  if (stream.frames.size() > std::numeric_limits<std::uint16_t>::max())
    throw InvalidInput("too many frames for the container");
  Writer w;
  for (std::uint8_t c : kMagic) w.u8(c);
  w.u8(kBitstreamVersion);
  w.u8(stream.qmap_signaled ? 1 : 0);
  w.u16(stream.width);
  w.u16(stream.height);
  w.u16(static_cast<std::uint16_t>(stream.frames.size()));
  w.u8(stream.level_count);
  w.u8(crc8(std::span(w.bytes()).first(kHeaderBytes - 1)));
  for (const FramePayload& f : stream.frames) {
    if (f.levels.size() != stream.level_count)
      throw InvalidInput("frame level count differs from header");
    if (!stream.qmap_signaled && !f.qmap.empty())
      throw InvalidInput("qmap payload present but not flagged");
    w.blob(f.qmap);
    for (const auto& level : f.levels) w.blob(level);
  }
  return std::move(w.bytes());
}

Bitstream unpack_bitstream(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes)
    throw StreamError(StreamErrc::kTruncated, bytes.size(), "header needs 14 bytes");
  for (std::size_t i = 0; i < 4; ++i)
    if (bytes[i] != kMagic[i]) throw StreamError(StreamErrc::kBadMagic, i, "expected LRCV");
  if (crc8(bytes.first(kHeaderBytes - 1)) != bytes[kHeaderBytes - 1])
    throw StreamError(StreamErrc::kHeaderCorrupt, kHeaderBytes - 1, "header check byte mismatch");

  Reader r(bytes);
  r.u32();  // magic
  const std::uint8_t version = r.u8();
  if (version != kBitstreamVersion)
    throw StreamError(StreamErrc::kVersionMismatch, 4,
                      "stream version " + std::to_string(version));
  const std::uint8_t flags = r.u8();
  if ((flags & ~1u) != 0)
    throw StreamError(StreamErrc::kHeaderCorrupt, 5, "unknown flag bits");
  Bitstream s;
  s.qmap_signaled = (flags & 1u) != 0;
  s.width = r.u16();
  s.height = r.u16();
  const std::uint16_t frames = r.u16();
  s.level_count = r.u8();
  r.u8();  // check
  if ((s.width == 0 || s.height == 0 || s.level_count == 0) && frames > 0)
    throw StreamError(StreamErrc::kHeaderCorrupt, 6, "zero dimension with frames present");

  s.frames.resize(frames);
  for (FramePayload& f : s.frames) {
    const std::size_t at = r.pos();
    f.qmap = r.blob();
    if (!s.qmap_signaled && !f.qmap.empty())
      throw StreamError(StreamErrc::kCorruptPayload, at, "unflagged qmap payload");
    f.levels.resize(s.level_count);
    for (auto& level : f.levels) level = r.blob();
  }
  if (!r.done())
    throw StreamError(StreamErrc::kTrailingData, r.pos(), "bytes after last frame");
  return s;
}

}  // namespace lrc::entropy
