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

#include "lrc/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrc/error.hpp"

namespace lrc::entropy {

void validate(const CdfTable& table) {
  if (table.cdf.size() < 2) throw InvalidInput("cdf table needs at least one bin");
  if (table.cdf.front() != 0) throw InvalidInput("cdf table must start at 0");
  if (table.cdf.back() != kTotalFreq)
    throw InvalidInput("cdf table must end at 2^16");
  for (std::size_t i = 0; i + 1 < table.cdf.size(); ++i) {
    if (table.cdf[i + 1] <= table.cdf[i])
      throw InvalidInput("cdf table has a zero-frequency bin at " +
                         std::to_string(i));
  }
}

CdfTable quantize_pmf(std::span<const double> pmf, std::int32_t min_symbol) {
  const std::size_t n = pmf.size();
  if (n == 0 || n > kTotalFreq)
    throw InvalidInput("pmf size must be in [1, 2^16]");
  double mass = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidInput("pmf entry not a probability");
    mass += p;
  }
  if (!(mass > 0.0)) throw InvalidInput("pmf has zero mass");

  const double avail = static_cast<double>(kTotalFreq - n);
  std::vector<std::uint32_t> freq(n);
  std::uint64_t used = 0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = pmf[i] / mass;
    freq[i] = 1 + static_cast<std::uint32_t>(std::floor(p * avail));
    used += freq[i];
    if (pmf[i] > pmf[argmax]) argmax = i;
  }
  // floor() keeps used <= 2^16 up to rounding of p; fix either direction.
  if (used > kTotalFreq) {
    std::uint64_t excess = used - kTotalFreq;
    freq[argmax] -= static_cast<std::uint32_t>(excess);
  } else {
    freq[argmax] += static_cast<std::uint32_t>(kTotalFreq - used);
  }

  CdfTable table;
  table.min_symbol = min_symbol;
  table.cdf.resize(n + 1);
  table.cdf[0] = 0;
  for (std::size_t i = 0; i < n; ++i) table.cdf[i + 1] = table.cdf[i] + freq[i];
  return table;
}

std::uint32_t TableSet::add(const CdfTable& table) {
  const auto id = static_cast<std::uint32_t>(offsets_.size());
  offsets_.push_back(static_cast<std::uint32_t>(cdf_.size()));
  sizes_.push_back(static_cast<std::uint32_t>(table.cdf.size()));
  min_symbols_.push_back(table.min_symbol);
  cdf_.insert(cdf_.end(), table.cdf.begin(), table.cdf.end());
  return id;
}

CdfTable TableSet::table(std::uint32_t id) const {
  if (id >= offsets_.size()) throw InvalidInput("table id out of range");
  CdfTable t;
  t.min_symbol = min_symbols_[id];
  auto first = cdf_.begin() + offsets_[id];
  t.cdf.assign(first, first + sizes_[id]);
  return t;
}

lrc_cdf_tables TableSet::view() const {
  return lrc_cdf_tables{cdf_.data(), offsets_.data(), sizes_.data(),
                        min_symbols_.data(), offsets_.size()};
}

}  // namespace lrc::entropy
