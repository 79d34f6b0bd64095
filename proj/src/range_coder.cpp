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

#include "lrc/range_coder.hpp"

#include <algorithm>
#include <string>

#include "lrc/error.hpp"

namespace lrc::rc {
namespace {

constexpr int kWindowBits = 56;
constexpr std::uint64_t kWindowMask = (std::uint64_t{1} << kWindowBits) - 1;
constexpr std::uint64_t kBottom = std::uint64_t{1} << 48;
constexpr int kShift = kWindowBits - 8;

}  // namespace

void Encoder::encode(std::uint32_t cum_freq, std::uint32_t freq) {
  const std::uint64_t r = range_ >> entropy::kPrecision;
  low_ += r * cum_freq;
  range_ = r * freq;
  while (range_ < kBottom) {
    range_ <<= 8;
    shift_low();
  }
}

void Encoder::shift_low() {
  const std::uint64_t carry = low_ >> kWindowBits;
  if ((low_ & kWindowMask) < (std::uint64_t{0xFF} << kShift) || carry != 0) {
    std::uint8_t pending = cache_;
    do {
      if (skip_first_) {
        skip_first_ = false;
      } else {
        out_.push_back(static_cast<std::uint8_t>(pending + carry));
      }
      pending = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>((low_ >> kShift) & 0xFF);
  }
  ++cache_size_;
  low_ = (low_ & ((std::uint64_t{1} << kShift) - 1)) << 8;
}

std::vector<std::uint8_t> Encoder::finish() {
  for (int i = 0; i < LRC_RC_FLUSH_BYTES + 1; ++i) shift_low();
  std::vector<std::uint8_t> out = std::move(out_);
  *this = Encoder();
  return out;
}

Decoder::Decoder(std::span<const std::uint8_t> data) : data_(data) {
  for (int i = 0; i < LRC_RC_FLUSH_BYTES; ++i) code_ = (code_ << 8) | next_byte();
  if (code_ >= range_)
    throw StreamError(StreamErrc::kCorruptPayload, 0, "range coder prime");
}

std::uint8_t Decoder::next_byte() {
  if (pos_ >= data_.size())
    throw StreamError(StreamErrc::kTruncated, pos_, "range coder payload exhausted");
  return data_[pos_++];
}

std::int32_t Decoder::decode(const std::uint32_t* cdf, std::size_t entries,
                             std::int32_t min_symbol) {
  if (cdf == nullptr || entries < 2)
    throw InvalidInput("cdf table needs at least one bin");
  const std::uint64_t r = range_ >> entropy::kPrecision;
  const std::uint64_t target = code_ / r;
  if (target >= entropy::kTotalFreq)
    throw StreamError(StreamErrc::kCorruptPayload, pos_, "code outside table mass");
  // Last bin j with cdf[j] <= target.
  const std::uint32_t* hit =
      std::upper_bound(cdf, cdf + entries, static_cast<std::uint32_t>(target)) - 1;
  const auto bin = static_cast<std::size_t>(hit - cdf);
  if (bin + 1 >= entries || cdf[bin + 1] <= cdf[bin])
    throw StreamError(StreamErrc::kCorruptPayload, pos_, "code outside table");
  code_ -= r * cdf[bin];
  range_ = r * (cdf[bin + 1] - cdf[bin]);
  while (range_ < kBottom) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
  return min_symbol + static_cast<std::int32_t>(bin);
}

std::int32_t Decoder::decode(const entropy::CdfTable& table) {
  return decode(table.cdf.data(), table.cdf.size(), table.min_symbol);
}

void Decoder::finish() const {
  if (pos_ != data_.size())
    throw StreamError(StreamErrc::kTrailingData, pos_,
                      std::to_string(data_.size() - pos_) + " unread bytes");
}

namespace {

struct TableRef {
  const std::uint32_t* cdf;
  std::size_t entries;
  std::int32_t min_symbol;
};

TableRef lookup(const lrc_cdf_tables& view, std::uint32_t id) {
  if (id >= view.count)
    throw InvalidInput("table id " + std::to_string(id) + " out of range");
  return {view.cdf + view.offsets[id], view.sizes[id], view.min_symbol[id]};
}

}  // namespace

std::vector<std::uint8_t> encode(std::span<const std::int32_t> symbols,
                                 std::span<const std::uint32_t> table_ids,
                                 const entropy::TableSet& tables) {
  if (symbols.size() != table_ids.size())
    throw InvalidInput("symbols and table ids differ in length");
  const lrc_cdf_tables view = tables.view();
  Encoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const TableRef t = lookup(view, table_ids[i]);
    const std::int64_t bin = std::int64_t{symbols[i]} - t.min_symbol;
    if (bin < 0 || bin + 1 >= static_cast<std::int64_t>(t.entries))
      throw InvalidInput("symbol " + std::to_string(symbols[i]) + " at index " +
                         std::to_string(i) + " outside table support");
    const std::uint32_t lo = t.cdf[bin];
    const std::uint32_t hi = t.cdf[bin + 1];
    if (hi <= lo) throw InvalidInput("zero-frequency bin at index " + std::to_string(i));
    enc.encode(lo, hi - lo);
  }
  return enc.finish();
}

std::vector<std::int32_t> decode(std::span<const std::uint8_t> payload,
                                 std::span<const std::uint32_t> table_ids,
                                 const entropy::TableSet& tables) {
  const lrc_cdf_tables view = tables.view();
  Decoder dec(payload);
  std::vector<std::int32_t> out(table_ids.size());
  for (std::size_t i = 0; i < table_ids.size(); ++i) {
    const TableRef t = lookup(view, table_ids[i]);
    out[i] = dec.decode(t.cdf, t.entries, t.min_symbol);
  }
  dec.finish();
  return out;
}

namespace {

[[noreturn]] void rethrow_status(int status, const char* msg) {
  switch (status) {
    case LRC_RC_STREAM_EXHAUSTED:
      throw StreamError(StreamErrc::kTruncated, 0, msg);
    case LRC_RC_CORRUPT_STREAM:
      throw StreamError(StreamErrc::kCorruptPayload, 0, msg);
    default:
      throw InvalidInput(std::string("range coder: ") + msg);
  }
}

}  // namespace

std::vector<std::uint8_t> backend_encode(std::span<const std::int32_t> symbols,
                                         std::span<const std::uint32_t> table_ids,
                                         const entropy::TableSet& tables) {
  if (symbols.size() != table_ids.size())
    throw InvalidInput("symbols and table ids differ in length");
  const lrc_cdf_tables view = tables.view();
  std::vector<std::uint8_t> out(lrc_rc_max_encoded_size(symbols.size()));
  std::size_t len = 0;
  char msg[256] = {0};
  const int status = lrc_rc_encode(symbols.data(), table_ids.data(), symbols.size(),
                                   &view, out.data(), out.size(), &len, msg, sizeof msg);
  if (status != LRC_RC_OK) rethrow_status(status, msg);
  out.resize(len);
  return out;
}

std::vector<std::int32_t> backend_decode(std::span<const std::uint8_t> payload,
                                         std::span<const std::uint32_t> table_ids,
                                         const entropy::TableSet& tables) {
  const lrc_cdf_tables view = tables.view();
  std::vector<std::int32_t> out(table_ids.size());
  char msg[256] = {0};
  const int status = lrc_rc_decode(payload.data(), payload.size(), table_ids.data(),
                                   table_ids.size(), &view, out.data(), msg, sizeof msg);
  if (status != LRC_RC_OK) rethrow_status(status, msg);
  return out;
}

}  // namespace lrc::rc
