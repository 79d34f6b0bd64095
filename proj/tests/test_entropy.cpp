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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lrc/entropy.hpp"
#include "lrc/error.hpp"

using namespace lrc::entropy;

namespace {

// Composite Simpson integral of the N(0, s^2) density over [a, b].
double density_integral(double a, double b, double s) {
  const int n = 20000;
  const double h = (b - a) / n;
  auto f = [s](double x) { return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2 * std::numbers::pi)); };
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4 : 2);
  return acc * h / 3;
}

}  // namespace

TEST_CASE("bin mass matches quadrature of the Gaussian density") {
  CHECK(gaussian_pmf(0, 1.0) == doctest::Approx(0.3829249).epsilon(1e-6));
  CHECK(gaussian_pmf(0, 1.0) == doctest::Approx(density_integral(-0.5, 0.5, 1.0)).epsilon(1e-9));
  for (double s : {0.3, 1.0, 2.5, 7.0})
    for (int k : {-3, -1, 1, 2, 5})
      CHECK(gaussian_bin_mass(k, s) == doctest::Approx(density_integral(k - 0.5, k + 0.5, s)).epsilon(1e-8));
}

TEST_CASE("bin masses telescope to one") {
  for (double s : {0.05, 0.4, 1.0, 3.3, 12.0}) {
    double total = 0.0;
    for (int k = -400; k <= 400; ++k) total += gaussian_bin_mass(k, s);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("wide priors flatten the distribution and floor the pmf") {
  CHECK(gaussian_bin_mass(0, 1e6) < 1e-6);
  CHECK(gaussian_pmf(0, 1e6) == kProbabilityFloor);
  CHECK(gaussian_pmf(40, 1.0) == kProbabilityFloor);
}

TEST_CASE("near-deterministic priors cost almost nothing at the mode") {
  std::vector<SymbolPlane> planes(1);
  planes[0].symbols.assign(1000, 0);
  planes[0].sigma_tilde.assign(1000, 0.01);
  const RateEstimate r = estimate_rate(planes, 1000.0);
  CHECK(r.total_bits < 1e-9);
  CHECK(r.total_bits == doctest::Approx(r.bits_per_level[0]));
}

TEST_CASE("Monte-Carlo rate matches the discretized-Gaussian entropy") {
  // Exact entropy by direct summation.
  double entropy = 0.0;
  for (int k = -60; k <= 60; ++k) {
    const double p = gaussian_bin_mass(k, 1.0);
    if (p > 0) entropy -= p * std::log2(p);
  }
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal(0.0, 1.0);
  SymbolPlane plane;
  for (int i = 0; i < 10000; ++i) {
    plane.symbols.push_back(static_cast<std::int32_t>(std::lround(normal(rng))));
    plane.sigma_tilde.push_back(1.0);
  }
  const RateEstimate r = estimate_rate(std::span(&plane, 1), 1.0);
  CHECK(r.total_bits / 10000 == doctest::Approx(entropy).epsilon(0.02));
}

TEST_CASE("doubling omega halves sigma_tilde and cuts the mode cost") {
  const double sigma = 1.3, omega = 0.7;
  CHECK(sigma / (2 * omega) == doctest::Approx(0.5 * sigma / omega));
  CHECK(symbol_bits(0, sigma / (2 * omega)) < symbol_bits(0, sigma / omega));
}

TEST_CASE("tight priors give a three-bin table dominated by the centre") {
  const CdfTable t = build_cdf_table(0.05 / 4.0);
  CHECK(t.bins() == 3);
  CHECK(t.min_symbol == -1);
  CHECK(t.freq(1) > 65000);
  CHECK(t.cdf.back() == 65536);
  CHECK(support_half_width(0.5) == 4);
  CHECK(support_half_width(1e9) == kMaxHalfWidth);
}

TEST_CASE("tables are valid and reproducible for random priors") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> log_s(std::log(1e-3), std::log(5e3));
  for (int i = 0; i < 500; ++i) {
    const double s = std::exp(log_s(rng));
    const CdfTable t = build_cdf_table(s);
    REQUIRE_NOTHROW(validate(t));
    CHECK(t.cdf.back() == kTotalFreq);
    CHECK(t.min_symbol == -support_half_width(s));
    CHECK(build_cdf_table(s) == t);
  }
  CHECK_THROWS_AS(build_cdf_table(0.0), lrc::InvalidInput);
}

TEST_CASE("plane roundtrip through the coder; coded size tracks the estimate") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> log_s(std::log(0.2), std::log(10.0));
  SymbolPlane plane;
  for (int i = 0; i < 20000; ++i) {
    const double s = std::exp(log_s(rng));
    const auto k = static_cast<std::int32_t>(std::lround(std::normal_distribution<double>(0, s)(rng)));
    plane.sigma_tilde.push_back(s);
    plane.symbols.push_back(clamp_to_support(k, s));
  }
  const auto bytes = encode_plane(plane);
  CHECK(decode_plane(bytes, plane.sigma_tilde) == plane.symbols);
  CHECK(decode_plane(bytes, plane.sigma_tilde, CoderBackend::kLinked) == plane.symbols);
  const double est = estimate_rate(std::span(&plane, 1), 1.0).total_bits;
  CHECK(std::fabs(bytes.size() * 8.0 - est) / est < 0.03);
}
