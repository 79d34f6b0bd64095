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

#include "lrc/cdf.hpp"

namespace lrc::rc {

/// Reference range encoder; the stream format is described in rangecoder.h.
class Encoder {
 public:
  void encode(std::uint32_t cum_freq, std::uint32_t freq);
  /// Flushes and returns the payload. The encoder is reset afterwards.
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint64_t range_ = (std::uint64_t{1} << 56) - 1;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  bool skip_first_ = true;
  std::vector<std::uint8_t> out_;
};

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> data);

  /// Decodes one symbol with the given table.
  std::int32_t decode(const entropy::CdfTable& table);
  std::int32_t decode(const std::uint32_t* cdf, std::size_t entries,
                      std::int32_t min_symbol);
  /// Throws unless every byte of the payload was consumed.
  void finish() const;

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::uint64_t code_ = 0;
  std::uint64_t range_ = (std::uint64_t{1} << 56) - 1;
};

/// Pure reference coder over a table set.
std::vector<std::uint8_t> encode(std::span<const std::int32_t> symbols,
                                 std::span<const std::uint32_t> table_ids,
                                 const entropy::TableSet& tables);
std::vector<std::int32_t> decode(std::span<const std::uint8_t> payload,
                                 std::span<const std::uint32_t> table_ids,
                                 const entropy::TableSet& tables);

/// Same calls routed through the lrc_rc_* boundary (whichever backend is
/// linked). Errors are rethrown as InvalidInput / StreamError.
std::vector<std::uint8_t> backend_encode(std::span<const std::int32_t> symbols,
                                         std::span<const std::uint32_t> table_ids,
                                         const entropy::TableSet& tables);
std::vector<std::int32_t> backend_decode(std::span<const std::uint8_t> payload,
                                         std::span<const std::uint32_t> table_ids,
                                         const entropy::TableSet& tables);

}  // namespace lrc::rc
