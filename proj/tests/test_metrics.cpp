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
#include <random>

#include "doctest.h"
#include "lrc/error.hpp"
#include "lrc/metrics.hpp"
#include "support/bd_oracle.hpp"

using namespace lrc;
using namespace lrc::eval;
using lrc::testing::bd_oracle;

namespace {

RdCurve curve(const std::vector<double>& r, const std::vector<double>& p) {
  RdCurve c;
  for (std::size_t i = 0; i < r.size(); ++i) c.points.push_back({r[i], p[i], ""});
  return c;
}

}  // namespace

TEST_CASE("psnr values") {
  const std::vector<float> x(12, 0.5f);
  CHECK(psnr(x, x, 2, 2, 3) == kPsnrCap);
  std::vector<float> y = x;
  for (auto& v : y) v += 1.0f / 255;
  CHECK(psnr(x, y, 2, 2, 3) == doctest::Approx(48.1308036).epsilon(1e-6));
  CHECK(psnr_from_mse(1.0) == doctest::Approx(20 * std::log10(255.0)));
  CHECK(psnr_from_mse(0.0) == kPsnrCap);
}

TEST_CASE("masked psnr") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> u(0, 1);
  const int h = 16, w = 20, c = 3;
  std::vector<float> x(h * w * c), y(h * w * c);
  for (auto& v : x) v = u(rng);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::clamp(x[i] + 0.05f * (u(rng) - 0.5f), 0.0f, 1.0f);

  const std::vector<std::uint8_t> full(h * w, 1);
  CHECK(psnr(x, y, h, w, c, std::span<const std::uint8_t>(full)) == doctest::Approx(psnr(x, y, h, w, c)));

  std::vector<std::uint8_t> in(h * w), out(h * w);
  for (int i = 0; i < h * w; ++i) {
    in[i] = (i % 7) < 3;
    out[i] = !in[i];
  }
  const SquaredError a = squared_error(x, y, h, w, c, std::span<const std::uint8_t>(in));
  const SquaredError b = squared_error(x, y, h, w, c, std::span<const std::uint8_t>(out));
  const SquaredError all = squared_error(x, y, h, w, c);
  CHECK(a.count + b.count == all.count);
  CHECK(a.sum + b.sum == doctest::Approx(all.sum).epsilon(1e-12));

  const std::vector<std::uint8_t> none(h * w, 0);
  CHECK_THROWS_AS(psnr(x, y, h, w, c, std::span<const std::uint8_t>(none)), InvalidInput);
  CHECK_THROWS_AS(psnr(x, std::span(y).first(10), h, w, c), InvalidInput);
}

TEST_CASE("bd-rate identities") {
  const RdCurve ref = curve({0.1, 0.2, 0.4, 0.8}, {30, 33, 36, 38.5});
  CHECK(std::fabs(bd_rate(ref, ref)) < 1e-12);
  RdCurve more = ref;
  for (auto& p : more.points) p.bpp *= 1.10;
  CHECK(bd_rate(ref, more) == doctest::Approx(10.0).epsilon(1e-9));
  const RdCurve other = curve({0.12, 0.22, 0.45, 0.9}, {30.5, 33.2, 36.1, 38.9});
  const double ab = bd_rate(ref, other), ba = bd_rate(other, ref);
  CHECK((1 + ab / 100) * (1 + ba / 100) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bd-rate reference values") {
  // Values from an independent monotone cubic implementation.
  CHECK(bd_rate(curve({0.1, 0.2, 0.4, 0.8}, {30, 33, 36, 38.5}),
                curve({0.12, 0.22, 0.45, 0.9}, {30.5, 33.2, 36.1, 38.9})) ==
        doctest::Approx(6.627389170423337).epsilon(1e-9));
  CHECK(bd_rate(curve({0.05, 0.11, 0.3, 0.7, 1.4}, {28, 31.5, 34, 37, 40}),
                curve({0.06, 0.1, 0.35, 0.6, 1.5}, {27.5, 30, 34.5, 36.5, 40.2})) ==
        doctest::Approx(12.284105945012392).epsilon(1e-9));
  CHECK(bd_rate(curve({0.2, 0.3, 0.5, 0.9}, {31, 32, 35, 36}),
                curve({0.15, 0.25, 0.45, 0.7}, {31.5, 33, 34.5, 37})) ==
        doctest::Approx(-21.28272169583156).epsilon(1e-9));
}

TEST_CASE("bd-rate agrees with dense numerical integration on random curves") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    auto make = [&] {
      std::vector<double> r, p;
      double rate = 0.02 + 0.1 * u(rng), q = 26 + 4 * u(rng);
      for (int i = 0; i < 4 + trial % 3; ++i) {
        r.push_back(rate);
        p.push_back(q);
        rate *= 1.3 + u(rng);
        q += 0.5 + 3 * u(rng);
      }
      return curve(r, p);
    };
    const RdCurve a = make(), b = make();
    double ours = 0;
    try {
      ours = bd_rate(a, b);
    } catch (const ComputationError&) {
      continue;  // disjoint quality ranges
    }
    CHECK(std::fabs(ours - bd_oracle(a, b)) <= 0.05);
  }
}

TEST_CASE("bd-rate input checks") {
  const RdCurve ref = curve({0.1, 0.2, 0.4, 0.8}, {30, 33, 36, 38.5});
  CHECK_THROWS_AS(bd_rate(ref, curve({0.1, 0.2, 0.4}, {30, 33, 36})), InvalidInput);
  CHECK_THROWS_AS(bd_rate(ref, curve({0.1, 0.2, 0.4, 0.8}, {40, 41, 42, 43})), ComputationError);
  CHECK_THROWS_AS(bd_rate(ref, curve({0.1, 0.1, 0.4, 0.8}, {30, 33, 36, 38.5})), InvalidInput);
}

TEST_CASE("pchip reproduces lines and integrates them exactly") {
  const Pchip p({0, 1, 3, 4}, {1, 3, 7, 9});
  CHECK(p(2.0) == doctest::Approx(5.0));
  CHECK(p.integrate(0, 4) == doctest::Approx(20.0));
  CHECK(p.integrate(0.5, 3.5) == doctest::Approx(15.0));
}
