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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lrc::eval {

inline constexpr double kPsnrCap = 100.0;

/// Sum of squared errors on the 8-bit scale and the number of samples it
/// covers, restricted to pixels where mask != 0 (all pixels without mask).
struct SquaredError {
  double sum = 0.0;
  std::size_t count = 0;
  double mse() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

/// x and x_hat are interleaved HWC buffers in [0, 1]; mask is H*W.
SquaredError squared_error(std::span<const float> x, std::span<const float> x_hat, int height,
                           int width, int channels,
                           std::optional<std::span<const std::uint8_t>> mask = std::nullopt);

double psnr_from_mse(double mse255);

/// 10 log10(255^2 / MSE) over the masked pixels, capped at 100 dB.
/// An empty mask is an InvalidInput error.
double psnr(std::span<const float> x, std::span<const float> x_hat, int height, int width,
            int channels, std::optional<std::span<const std::uint8_t>> mask = std::nullopt);

inline double bpp(double bits, int height, int width) {
  return bits / (static_cast<double>(height) * width);
}

struct RdPoint {
  double bpp = 0.0;
  double psnr = 0.0;
  std::string label;
};

/// Ordered by strictly increasing bpp.
struct RdCurve {
  std::string label;
  std::vector<RdPoint> points;

  void validate() const;
};

/// Bjontegaard delta rate in percent: piecewise cubic (monotone Hermite)
/// interpolation of log10(bpp) over PSNR, integrated over the overlapping
/// PSNR interval. Positive means the test curve needs more rate.
double bd_rate(const RdCurve& reference, const RdCurve& test);

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes
/// with the three-point end condition).
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  /// Exact integral over [a, b] within the data range.
  double integrate(double a, double b) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::size_t segment(double x) const;
  double segment_antiderivative(std::size_t k, double t) const;

  std::vector<double> x_, y_, d_;
};

}  // namespace lrc::eval
