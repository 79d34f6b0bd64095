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
#include <string>
#include <vector>

namespace lrc::qmap {

/// Per-pixel rate-distortion trade-off in [0, 1]; 0 is lowest rate and
/// quality, 1 the highest. Row-major.
class QualityMap {
 public:
  QualityMap() = default;
  /// Throws InvalidInput on zero dims, size mismatch, or values outside
  /// [0, 1] (including NaN).
  QualityMap(int height, int width, std::vector<float> values);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return values_.size(); }
  std::span<const float> values() const { return values_; }
  float at(int y, int x) const { return values_[index(y, x)]; }
  float min() const;
  float max() const;
  double mean() const;

  friend bool operator==(const QualityMap&, const QualityMap&) = default;

 private:
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;
};

inline constexpr double kDefaultAlpha = 0.001;
inline constexpr double kDefaultBeta = 6.0;

/// Per-pixel Lagrangian weights alpha * exp(beta * m).
struct LambdaMap {
  int height = 0;
  int width = 0;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  std::vector<double> values;
};

inline double lambda_of(double m, double alpha = kDefaultAlpha,
                        double beta = kDefaultBeta) {
  return alpha * std::exp(beta * m);
}

/// Inverse of lambda_of clamped to [0, 1].
double level_for_lambda(double lambda, double alpha = kDefaultAlpha,
                        double beta = kDefaultBeta);

LambdaMap lambda_map(const QualityMap& m, double alpha = kDefaultAlpha,
                     double beta = kDefaultBeta);
/// Raw-value variant; rejects non-finite entries with InvalidInput.
LambdaMap lambda_map(int height, int width, std::span<const float> m,
                     double alpha = kDefaultAlpha, double beta = kDefaultBeta);

QualityMap uniform_map(int height, int width, double level);

enum class ShapeKind : std::uint8_t { kRectangle, kEllipse };

/// Axis-aligned region in pixel coordinates: the box [x, x+w) x [y, y+h);
/// an ellipse is inscribed in the box.
struct Region {
  ShapeKind kind = ShapeKind::kRectangle;
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  double level = 1.0;
};

/// Background everywhere, region interiors at their levels; later regions
/// overwrite earlier ones.
QualityMap compose_region_map(int height, int width, double background,
                              std::span<const Region> regions);

/// Binary in-region mask (1 inside any region) matching compose_region_map.
std::vector<std::uint8_t> region_mask(int height, int width,
                                      std::span<const Region> regions);

// ---------------------------------------------------------------------------
// Constrained-random generation.

struct MapGenConfig {
  /// Probabilities of (smooth field, sharp shapes, near-constant); sum to 1.
  double mix_smooth = 1.0 / 3.0;
  double mix_sharp = 1.0 / 3.0;
  double mix_constant = 1.0 / 3.0;
  int min_shapes = 1;
  int max_shapes = 4;
  /// Per-frame bound on level changes; 0 freezes all levels.
  double delta = 0.1;
  /// Max shape displacement per frame along each axis, pixels.
  double shape_motion = 2.0;
  /// Box-filter width used on smooth fields, pixels.
  int smoothing = 9;
  /// Peak deviation of the near-constant class around its level.
  double constant_ripple = 0.02;

  /// Throws InvalidInput if the mixture or ranges are invalid.
  void validate() const;
};

struct MapShape {
  ShapeKind kind = ShapeKind::kRectangle;
  double cx = 0.0;
  double cy = 0.0;
  double half_w = 0.0;
  double half_h = 0.0;
  double level = 0.0;

  bool contains(double px, double py) const;
};

enum class BaseKind : std::uint8_t { kFlat, kSmooth, kNearConstant };

/// Everything needed to re-render a generated map and to move it forward
/// in time. The rendered map is a pure function of this record.
struct MapFeatures {
  int height = 0;
  int width = 0;
  BaseKind base = BaseKind::kFlat;
  double level = 0.5;            // flat / near-constant level
  int grid_h = 0;                // smooth / ripple control grid
  int grid_w = 0;
  std::vector<double> grid;      // smooth: values; near-constant: ripple in [-1,1]
  int smoothing = 1;
  double ripple = 0.0;
  std::vector<MapShape> shapes;  // drawn in order over the base
};

struct GeneratedMap {
  QualityMap map;
  MapFeatures features;
};

QualityMap render(const MapFeatures& features);

/// Index of the topmost shape covering each pixel, -1 for the base layer.
std::vector<int> owner_map(const MapFeatures& features);

/// Requires height, width >= 16. Deterministic in (dims, cfg, seed).
GeneratedMap generate_initial_map(int height, int width, const MapGenConfig& cfg,
                                  std::uint64_t seed);

/// Random-walk update: levels move by at most cfg.delta, shapes by at most
/// cfg.shape_motion pixels per axis. Pixels whose owner is unchanged move
/// by at most delta.
GeneratedMap update_map(const GeneratedMap& prev, const MapGenConfig& cfg,
                        std::uint64_t seed);

/// generate_initial_map followed by frames - 1 updates; frame t uses a seed
/// derived from (seed, t).
std::vector<GeneratedMap> generate_sequence(int height, int width, int frames,
                                            const MapGenConfig& cfg,
                                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Signaling codec.

inline constexpr int kSignalFactor = 16;
inline constexpr int kSignalBits = 6;
inline constexpr int kSignalLevels = 1 << kSignalBits;

/// Coarse grid dims for an H x W map: ceil(H/16) x ceil(W/16).
inline int signal_dim(int pixels) { return (pixels + kSignalFactor - 1) / kSignalFactor; }

/// Coarse samples chosen so the bilinear reconstruction has the same
/// 16x16 block means as m, clamped to [0, 1].
std::vector<double> signal_grid(const QualityMap& m);

/// Bilinear (half-pixel centered, edge-clamped) upsampling of a coarse grid.
std::vector<float> upsample_grid(std::span<const double> grid, int grid_h, int grid_w,
                                 int height, int width);

/// Payload: mode byte (0 = packed 6-bit codes, 1 = range-coded row DPCM),
/// then the codes; the smaller representation is emitted.
std::vector<std::uint8_t> encode_qmap(const QualityMap& m);
/// Throws StreamError with a byte offset on malformed payloads.
QualityMap decode_qmap(std::span<const std::uint8_t> payload, int height, int width);

// ---------------------------------------------------------------------------
// Files.

/// Raw float format: "QMAP" | u16 H | u16 W | u32 reserved | u32 frames,
/// big-endian, followed by frames * H * W big-endian f32 values.
void write_qmap_raw(const std::string& path, std::span<const QualityMap> maps);
std::vector<QualityMap> read_qmap_raw(const std::string& path);

/// 8-bit single-channel image (PGM or PNG), value / 255.
void write_qmap_image(const std::string& path, const QualityMap& m);
QualityMap read_qmap_image(const std::string& path);

/// Dispatches on the "QMAP" magic; otherwise reads an image.
std::vector<QualityMap> read_qmap_file(const std::string& path);

}  // namespace lrc::qmap
