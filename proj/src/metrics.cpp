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

#include "lrc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrc/error.hpp"

namespace lrc::eval {

SquaredError squared_error(std::span<const float> x, std::span<const float> x_hat, int height,
                           int width, int channels,
                           std::optional<std::span<const std::uint8_t>> mask) {
  const std::size_t pixels = static_cast<std::size_t>(height) * width;
  if (x.size() != x_hat.size() || x.size() != pixels * channels)
    throw InvalidInput("psnr: image shapes differ");
  if (mask && mask->size() != pixels) throw InvalidInput("psnr: mask shape differs");
  SquaredError se;
  for (std::size_t p = 0; p < pixels; ++p) {
    if (mask && (*mask)[p] == 0) continue;
    for (int c = 0; c < channels; ++c) {
      const double d = 255.0 * (static_cast<double>(x[p * channels + c]) - x_hat[p * channels + c]);
      se.sum += d * d;
    }
    se.count += static_cast<std::size_t>(channels);
  }
  return se;
}

double psnr_from_mse(double mse255) {
  if (!(mse255 > 0.0)) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse255));
}

double psnr(std::span<const float> x, std::span<const float> x_hat, int height, int width,
            int channels, std::optional<std::span<const std::uint8_t>> mask) {
  const SquaredError se = squared_error(x, x_hat, height, width, channels, mask);
  if (se.count == 0) throw InvalidInput("psnr: empty region mask");
  return psnr_from_mse(se.mse());
}

void RdCurve::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].bpp) || !std::isfinite(points[i].psnr) || points[i].bpp <= 0.0)
      throw InvalidInput("rd point needs finite positive bpp and finite psnr");
    if (i > 0 && !(points[i].bpp > points[i - 1].bpp))
      throw InvalidInput("rd curve must have strictly increasing bpp");
  }
}

// ---------------------------------------------------------------------------

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

double edge_slope(double h0, double h1, double m0, double m1) {
  double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
  if (sign(d) != sign(m0)) return 0.0;
  if (sign(m0) != sign(m1) && std::fabs(d) > 3.0 * std::fabs(m0)) return 3.0 * m0;
  return d;
}

}  // namespace

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw InvalidInput("pchip needs >= 2 matching samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw InvalidInput("pchip abscissae must increase strictly");
  std::vector<double> h(n - 1), m(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    m[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = m[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (m[k - 1] * m[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d_[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
  }
  d_[0] = edge_slope(h[0], h[1], m[0], m[1]);
  d_[n - 1] = edge_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

std::size_t Pchip::segment(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - x_.begin() - 1));
  return std::min(k, x_.size() - 2);
}

double Pchip::operator()(double x) const {
  const std::size_t k = segment(x);
  const double h = x_[k + 1] - x_[k];
  const double delta = (y_[k + 1] - y_[k]) / h;
  const double t = x - x_[k];
  const double c2 = (3.0 * delta - 2.0 * d_[k] - d_[k + 1]) / h;
  const double c3 = (d_[k] + d_[k + 1] - 2.0 * delta) / (h * h);
  return y_[k] + t * (d_[k] + t * (c2 + t * c3));
}

double Pchip::segment_antiderivative(std::size_t k, double t) const {
  const double h = x_[k + 1] - x_[k];
  const double delta = (y_[k + 1] - y_[k]) / h;
  const double c2 = (3.0 * delta - 2.0 * d_[k] - d_[k + 1]) / h;
  const double c3 = (d_[k] + d_[k + 1] - 2.0 * delta) / (h * h);
  return t * (y_[k] + t * (d_[k] / 2.0 + t * (c2 / 3.0 + t * c3 / 4.0)));
}

double Pchip::integrate(double a, double b) const {
  if (a > b) return -integrate(b, a);
  if (a < x_.front() - 1e-12 || b > x_.back() + 1e-12)
    throw InvalidInput("pchip integration outside the data range");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    const double lo = std::max(a, x_[k]);
    const double hi = std::min(b, x_[k + 1]);
    if (hi <= lo) continue;
    total += segment_antiderivative(k, hi - x_[k]) - segment_antiderivative(k, lo - x_[k]);
  }
  return total;
}

namespace {

Pchip log_rate_over_psnr(const RdCurve& c) {
  c.validate();
  if (c.points.size() < 4) throw InvalidInput("bd_rate needs at least 4 points per curve");
  std::vector<RdPoint> pts = c.points;
  std::sort(pts.begin(), pts.end(), [](const RdPoint& a, const RdPoint& b) { return a.psnr < b.psnr; });
  std::vector<double> x, y;
  for (const RdPoint& p : pts) {
    x.push_back(p.psnr);
    y.push_back(std::log10(p.bpp));
  }
  return Pchip(std::move(x), std::move(y));
}

}  // namespace

double bd_rate(const RdCurve& reference, const RdCurve& test) {
  const Pchip ref = log_rate_over_psnr(reference);
  const Pchip tst = log_rate_over_psnr(test);
  const double lo = std::max(ref.front(), tst.front());
  const double hi = std::min(ref.back(), tst.back());
  if (!(hi > lo)) throw ComputationError("bd_rate: curves do not overlap in PSNR");
  const double avg = (tst.integrate(lo, hi) - ref.integrate(lo, hi)) / (hi - lo);
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

}  // namespace lrc::eval
