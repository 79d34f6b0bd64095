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

#include "lrc/rangecoder.h"

namespace lrc::entropy {

inline constexpr int kPrecision = LRC_RC_PRECISION;
inline constexpr std::uint32_t kTotalFreq = 1u << kPrecision;

/// Static cumulative frequency table. Bin j codes min_symbol + j.
struct CdfTable {
  std::vector<std::uint32_t> cdf;
  std::int32_t min_symbol = 0;

  std::size_t bins() const { return cdf.empty() ? 0 : cdf.size() - 1; }
  std::int32_t max_symbol() const {
    return min_symbol + static_cast<std::int32_t>(bins()) - 1;
  }
  std::uint32_t freq(std::size_t bin) const { return cdf[bin + 1] - cdf[bin]; }
  bool contains(std::int32_t k) const {
    return k >= min_symbol && k <= max_symbol();
  }

  friend bool operator==(const CdfTable&, const CdfTable&) = default;
};

/// Throws InvalidInput unless the table starts at 0, ends at 2^16 and every
/// bin has nonzero frequency.
void validate(const CdfTable& table);

/// Quantizes a probability vector to a table with total mass 2^16 and a
/// frequency floor of 1 per bin. Bin j receives 1 + floor(p_j * (2^16 - n));
/// the remainder goes to the first most probable bin.
CdfTable quantize_pmf(std::span<const double> pmf, std::int32_t min_symbol);

/// Flattened table collection in the layout of lrc_cdf_tables.
class TableSet {
 public:
  std::uint32_t add(const CdfTable& table);
  std::size_t size() const { return offsets_.size(); }
  CdfTable table(std::uint32_t id) const;

  /// Valid until the next add().
  lrc_cdf_tables view() const;

 private:
  std::vector<std::uint32_t> cdf_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> sizes_;
  std::vector<std::int32_t> min_symbols_;
};

}  // namespace lrc::entropy
