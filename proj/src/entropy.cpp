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

#include "lrc/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "lrc/error.hpp"
#include "lrc/range_coder.hpp"

namespace lrc::entropy {
namespace {

// Upper tail Q(x) = 1 - Phi(x), accurate for large x.
double upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double gaussian_bin_mass(std::int32_t k, double sigma_tilde) {
  // Evaluate on the side of zero that keeps both terms in the small tail.
  const double a = std::fabs(static_cast<double>(k));
  if (k == 0) return 1.0 - 2.0 * upper_tail(0.5 / sigma_tilde);
  return upper_tail((a - 0.5) / sigma_tilde) - upper_tail((a + 0.5) / sigma_tilde);
}

double gaussian_pmf(std::int32_t k, double sigma_tilde) {
  return std::max(gaussian_bin_mass(k, sigma_tilde), kProbabilityFloor);
}

std::int32_t support_half_width(double sigma_tilde) {
  if (!(sigma_tilde > 0.0)) return 1;
  const double k = std::ceil(8.0 * sigma_tilde);
  if (k >= kMaxHalfWidth) return kMaxHalfWidth;
  return std::max<std::int32_t>(1, static_cast<std::int32_t>(k));
}

CdfTable build_cdf_table(double sigma_tilde) {
  if (!(sigma_tilde > 0.0) || !std::isfinite(sigma_tilde))
    throw InvalidInput("sigma_tilde must be positive and finite");
  const std::int32_t half = support_half_width(sigma_tilde);
  std::vector<double> pmf(2 * static_cast<std::size_t>(half) + 1);
  for (std::int32_t k = -half + 1; k < half; ++k)
    pmf[static_cast<std::size_t>(k + half)] = gaussian_bin_mass(k, sigma_tilde);
  const double tail = upper_tail((half - 0.5) / sigma_tilde);
  pmf.front() = tail;
  pmf.back() = tail;
  return quantize_pmf(pmf, -half);
}

PlaneTables build_plane_tables(std::span<const double> sigma_tilde) {
  PlaneTables out;
  out.ids.reserve(sigma_tilde.size());
  std::unordered_map<std::uint64_t, std::uint32_t> seen;
  for (double s : sigma_tilde) {
    const auto key = std::bit_cast<std::uint64_t>(s);
    auto it = seen.find(key);
    if (it == seen.end()) it = seen.emplace(key, out.tables.add(build_cdf_table(s))).first;
    out.ids.push_back(it->second);
  }
  return out;
}

RateEstimate estimate_rate(std::span<const SymbolPlane> levels, double pixels) {
  if (!(pixels > 0.0)) throw InvalidInput("pixel count must be positive");
  RateEstimate est;
  for (const SymbolPlane& plane : levels) {
    if (plane.symbols.size() != plane.sigma_tilde.size())
      throw InvalidInput("symbol plane and priors differ in size");
    double bits = 0.0;
    for (std::size_t i = 0; i < plane.symbols.size(); ++i)
      bits += symbol_bits(plane.symbols[i], plane.sigma_tilde[i]);
    est.bits_per_level.push_back(bits);
    est.total_bits += bits;
  }
  est.bpp = est.total_bits / pixels;
  return est;
}

std::vector<std::uint8_t> encode_plane(const SymbolPlane& plane, CoderBackend backend) {
  if (plane.symbols.size() != plane.sigma_tilde.size())
    throw InvalidInput("symbol plane and priors differ in size");
  const PlaneTables pt = build_plane_tables(plane.sigma_tilde);
  return backend == CoderBackend::kReference
             ? rc::encode(plane.symbols, pt.ids, pt.tables)
             : rc::backend_encode(plane.symbols, pt.ids, pt.tables);
}

std::vector<std::int32_t> decode_plane(std::span<const std::uint8_t> payload,
                                       std::span<const double> sigma_tilde,
                                       CoderBackend backend) {
  const PlaneTables pt = build_plane_tables(sigma_tilde);
  return backend == CoderBackend::kReference
             ? rc::decode(payload, pt.ids, pt.tables)
             : rc::backend_decode(payload, pt.ids, pt.tables);
}

}  // namespace lrc::entropy
