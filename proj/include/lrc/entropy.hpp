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

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lrc/cdf.hpp"

namespace lrc::entropy {

/// Lower clamp applied to every modeled symbol probability.
inline constexpr double kProbabilityFloor = 1.0 / 65536.0;
/// Cap on the table half-width; keeps tables well below 2^16 bins.
inline constexpr std::int32_t kMaxHalfWidth = 2048;

double normal_cdf(double x);

/// Mass of the integer bin k under a zero-mean Gaussian with scale
/// sigma_tilde = sigma / omega. Not clamped.
double gaussian_bin_mass(std::int32_t k, double sigma_tilde);

/// gaussian_bin_mass clamped below by 2^-16.
double gaussian_pmf(std::int32_t k, double sigma_tilde);

inline double symbol_bits(std::int32_t k, double sigma_tilde) {
  return -std::log2(gaussian_pmf(k, sigma_tilde));
}

/// Half-width K of the coded support [-K, K]: ceil(8 sigma_tilde), at
/// least 1 and at most kMaxHalfWidth. The end bins absorb the tails.
std::int32_t support_half_width(double sigma_tilde);

inline std::int32_t clamp_to_support(std::int32_t k, double sigma_tilde) {
  const std::int32_t half = support_half_width(sigma_tilde);
  return k < -half ? -half : (k > half ? half : k);
}

/// Discretized Gaussian table for sigma_tilde with tail-mass escape bins.
CdfTable build_cdf_table(double sigma_tilde);

/// Symbols of one latent level plus the scale of the discretized Gaussian
/// each symbol was coded with (one entry per symbol).
struct SymbolPlane {
  std::vector<std::int32_t> symbols;
  std::vector<double> sigma_tilde;
};

/// Tables for a plane, deduplicated by exact sigma_tilde value.
struct PlaneTables {
  TableSet tables;
  std::vector<std::uint32_t> ids;
};
PlaneTables build_plane_tables(std::span<const double> sigma_tilde);

struct RateEstimate {
  std::vector<double> bits_per_level;
  double total_bits = 0.0;
  double bpp = 0.0;
};

/// Sum of -log2 p(k) per level; bpp divides by pixels.
RateEstimate estimate_rate(std::span<const SymbolPlane> levels, double pixels);

/// kReference calls the in-tree coder directly; kLinked goes through the
/// lrc_rc_* boundary (native kernel when linked, reference otherwise).
enum class CoderBackend { kReference, kLinked };

/// Range-codes a plane with the tables built from its priors; symbols must
/// already be clamped to their support.
std::vector<std::uint8_t> encode_plane(const SymbolPlane& plane,
                                       CoderBackend backend = CoderBackend::kReference);
/// Inverse of encode_plane given the decoder-side priors.
std::vector<std::int32_t> decode_plane(std::span<const std::uint8_t> payload,
                                       std::span<const double> sigma_tilde,
                                       CoderBackend backend = CoderBackend::kReference);

}  // namespace lrc::entropy
