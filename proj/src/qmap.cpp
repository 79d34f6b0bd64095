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

#include "lrc/qmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "lrc/error.hpp"
#include "lrc/seed.hpp"

namespace lrc::qmap {

QualityMap::QualityMap(int height, int width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height <= 0 || width <= 0) throw InvalidInput("quality map needs positive dimensions");
  if (values_.size() != static_cast<std::size_t>(height) * width)
    throw InvalidInput("quality map values do not match " + std::to_string(height) + "x" +
                       std::to_string(width));
  for (float v : values_)
    if (!(v >= 0.0f && v <= 1.0f)) throw InvalidInput("quality map value outside [0, 1]");
}

float QualityMap::min() const { return *std::min_element(values_.begin(), values_.end()); }
float QualityMap::max() const { return *std::max_element(values_.begin(), values_.end()); }
double QualityMap::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(size());
}

double level_for_lambda(double lambda, double alpha, double beta) {
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  return std::clamp(std::log(lambda / alpha) / beta, 0.0, 1.0);
}

LambdaMap lambda_map(int height, int width, std::span<const float> m, double alpha,
                     double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidInput("alpha and beta must be positive");
  if (m.size() != static_cast<std::size_t>(height) * width)
    throw InvalidInput("lambda_map: size mismatch");
  LambdaMap out{height, width, alpha, beta, std::vector<double>(m.size())};
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m[i])) throw InvalidInput("lambda_map: non-finite input");
    out.values[i] = lambda_of(m[i], alpha, beta);
  }
  return out;
}

LambdaMap lambda_map(const QualityMap& m, double alpha, double beta) {
  return lambda_map(m.height(), m.width(), m.values(), alpha, beta);
}

QualityMap uniform_map(int height, int width, double level) {
  if (!(level >= 0.0 && level <= 1.0)) throw InvalidInput("uniform level outside [0, 1]");
  return QualityMap(height, width,
                    std::vector<float>(static_cast<std::size_t>(height) * width,
                                       static_cast<float>(level)));
}

namespace {

bool region_contains(const Region& r, int y, int x) {
  if (x < r.x || x >= r.x + r.w || y < r.y || y >= r.y + r.h) return false;
  if (r.kind == ShapeKind::kRectangle) return true;
  const double dx = (x + 0.5 - r.x - r.w / 2.0) / (r.w / 2.0);
  const double dy = (y + 0.5 - r.y - r.h / 2.0) / (r.h / 2.0);
  return dx * dx + dy * dy <= 1.0;
}

void check_regions(int height, int width, std::span<const Region> regions) {
  for (const Region& r : regions) {
    if (r.w <= 0 || r.h <= 0 || r.x < 0 || r.y < 0 || r.x + r.w > width || r.y + r.h > height)
      throw InvalidInput("region outside the frame");
    if (!(r.level >= 0.0 && r.level <= 1.0)) throw InvalidInput("region level outside [0, 1]");
  }
}

}  // namespace

QualityMap compose_region_map(int height, int width, double background,
                              std::span<const Region> regions) {
  QualityMap base = uniform_map(height, width, background);
  check_regions(height, width, regions);
  std::vector<float> v(base.values().begin(), base.values().end());
  for (const Region& r : regions)
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x)
        if (region_contains(r, y, x))
          v[static_cast<std::size_t>(y) * width + x] = static_cast<float>(r.level);
  return QualityMap(height, width, std::move(v));
}

std::vector<std::uint8_t> region_mask(int height, int width, std::span<const Region> regions) {
  check_regions(height, width, regions);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(height) * width, 0);
  for (const Region& r : regions)
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x)
        if (region_contains(r, y, x)) mask[static_cast<std::size_t>(y) * width + x] = 1;
  return mask;
}

// ---------------------------------------------------------------------------

void MapGenConfig::validate() const {
  const double mix[3] = {mix_smooth, mix_sharp, mix_constant};
  for (double w : mix)
    if (!(w >= 0.0)) throw InvalidInput("mix weights must be nonnegative");
  if (std::fabs(mix[0] + mix[1] + mix[2] - 1.0) > 1e-9)
    throw InvalidInput("mix weights must sum to 1");
  if (min_shapes < 1 || max_shapes < min_shapes)
    throw InvalidInput("shape count range must satisfy 1 <= min <= max");
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidInput("delta must lie in [0, 1]");
  if (!(shape_motion >= 0.0)) throw InvalidInput("shape motion must be nonnegative");
  if (smoothing < 1) throw InvalidInput("smoothing width must be >= 1");
  if (!(constant_ripple >= 0.0 && constant_ripple <= 0.025))
    throw InvalidInput("constant ripple must lie in [0, 0.025]");
}

bool MapShape::contains(double px, double py) const {
  const double dx = (px - cx) / half_w;
  const double dy = (py - cy) / half_h;
  if (kind == ShapeKind::kRectangle) return std::fabs(dx) <= 1.0 && std::fabs(dy) <= 1.0;
  return dx * dx + dy * dy <= 1.0;
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Corner-aligned bilinear interpolation of a control grid over the frame.
std::vector<double> interpolate_grid(const std::vector<double>& grid, int gh, int gw, int height,
                                     int width) {
  std::vector<double> out(static_cast<std::size_t>(height) * width);
  for (int y = 0; y < height; ++y) {
    const double v = height > 1 ? static_cast<double>(y) * (gh - 1) / (height - 1) : 0.0;
    const int i0 = std::min(static_cast<int>(v), gh - 1);
    const int i1 = std::min(i0 + 1, gh - 1);
    const double fy = v - i0;
    for (int x = 0; x < width; ++x) {
      const double u = width > 1 ? static_cast<double>(x) * (gw - 1) / (width - 1) : 0.0;
      const int j0 = std::min(static_cast<int>(u), gw - 1);
      const int j1 = std::min(j0 + 1, gw - 1);
      const double fx = u - j0;
      const double top = grid[i0 * gw + j0] * (1 - fx) + grid[i0 * gw + j1] * fx;
      const double bot = grid[i1 * gw + j0] * (1 - fx) + grid[i1 * gw + j1] * fx;
      out[static_cast<std::size_t>(y) * width + x] = top * (1 - fy) + bot * fy;
    }
  }
  return out;
}

// Separable box filter with edge clamping.
void box_blur(std::vector<double>& img, int height, int width, int k) {
  if (k <= 1) return;
  const int r = k / 2;
  std::vector<double> tmp(img.size());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double s = 0.0;
      for (int d = -r; d <= r; ++d) s += img[static_cast<std::size_t>(y) * width + std::clamp(x + d, 0, width - 1)];
      tmp[static_cast<std::size_t>(y) * width + x] = s / (2 * r + 1);
    }
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double s = 0.0;
      for (int d = -r; d <= r; ++d) s += tmp[static_cast<std::size_t>(std::clamp(y + d, 0, height - 1)) * width + x];
      img[static_cast<std::size_t>(y) * width + x] = s / (2 * r + 1);
    }
}

double step_level(Rng& rng, double v, double delta) {
  return std::clamp(v + uniform(rng, -delta, delta), 0.0, 1.0);
}

}  // namespace

QualityMap render(const MapFeatures& f) {
  const std::size_t n = static_cast<std::size_t>(f.height) * f.width;
  std::vector<double> base;
  switch (f.base) {
    case BaseKind::kFlat:
      base.assign(n, f.level);
      break;
    case BaseKind::kSmooth:
      base = interpolate_grid(f.grid, f.grid_h, f.grid_w, f.height, f.width);
      box_blur(base, f.height, f.width, f.smoothing);
      break;
    case BaseKind::kNearConstant:
      base = interpolate_grid(f.grid, f.grid_h, f.grid_w, f.height, f.width);
      for (double& v : base) v = f.level + f.ripple * v;
      break;
  }
  std::vector<float> out(n);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * f.width + x;
      double v = base[i];
      for (const MapShape& s : f.shapes)
        if (s.contains(x + 0.5, y + 0.5)) v = s.level;
      out[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  return QualityMap(f.height, f.width, std::move(out));
}

std::vector<int> owner_map(const MapFeatures& f) {
  std::vector<int> owner(static_cast<std::size_t>(f.height) * f.width, -1);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      for (std::size_t s = 0; s < f.shapes.size(); ++s)
        if (f.shapes[s].contains(x + 0.5, y + 0.5))
          owner[static_cast<std::size_t>(y) * f.width + x] = static_cast<int>(s);
  return owner;
}

GeneratedMap generate_initial_map(int height, int width, const MapGenConfig& cfg,
                                  std::uint64_t seed) {
  cfg.validate();
  if (height < 16 || width < 16) throw InvalidInput("generated maps need H, W >= 16");
  Rng rng(seed);
  MapFeatures f;
  f.height = height;
  f.width = width;
  f.smoothing = cfg.smoothing;

  const bool with_shapes = uniform(rng, 0.0, 1.0) < cfg.mix_sharp;
  const double base_mass = cfg.mix_smooth + cfg.mix_constant;
  if (base_mass <= 0.0) {
    f.base = BaseKind::kFlat;
  } else {
    f.base = uniform(rng, 0.0, base_mass) < cfg.mix_smooth ? BaseKind::kSmooth
                                                           : BaseKind::kNearConstant;
  }
  f.level = uniform(rng, 0.0, 1.0);
  if (f.base == BaseKind::kSmooth) {
    f.grid_h = uniform_int(rng, 2, 5);
    f.grid_w = uniform_int(rng, 2, 5);
    f.grid.resize(static_cast<std::size_t>(f.grid_h) * f.grid_w);
    for (double& g : f.grid) g = uniform(rng, 0.0, 1.0);
  } else if (f.base == BaseKind::kNearConstant) {
    f.grid_h = 3;
    f.grid_w = 3;
    f.grid.resize(9);
    for (double& g : f.grid) g = uniform(rng, -1.0, 1.0);
    f.ripple = cfg.constant_ripple;
  }

  if (with_shapes) {
    const int count = uniform_int(rng, cfg.min_shapes, cfg.max_shapes);
    for (int i = 0; i < count; ++i) {
      MapShape s;
      s.kind = uniform(rng, 0.0, 1.0) < 0.5 ? ShapeKind::kRectangle : ShapeKind::kEllipse;
      s.half_w = uniform(rng, width / 10.0, width / 3.0);
      s.half_h = uniform(rng, height / 10.0, height / 3.0);
      s.cx = uniform(rng, 0.0, width);
      s.cy = uniform(rng, 0.0, height);
      s.level = uniform(rng, 0.0, 1.0);
      f.shapes.push_back(s);
    }
  }
  GeneratedMap out{render(f), std::move(f)};
  return out;
}

GeneratedMap update_map(const GeneratedMap& prev, const MapGenConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  MapFeatures f = prev.features;
  if (f.base == BaseKind::kSmooth) {
    for (double& g : f.grid) g = step_level(rng, g, cfg.delta);
  } else {
    f.level = step_level(rng, f.level, cfg.delta);
  }
  for (MapShape& s : f.shapes) {
    s.cx = std::clamp(s.cx + uniform(rng, -cfg.shape_motion, cfg.shape_motion), 0.0,
                      static_cast<double>(f.width));
    s.cy = std::clamp(s.cy + uniform(rng, -cfg.shape_motion, cfg.shape_motion), 0.0,
                      static_cast<double>(f.height));
    s.level = step_level(rng, s.level, cfg.delta);
  }
  GeneratedMap out{render(f), std::move(f)};
  return out;
}

std::vector<GeneratedMap> generate_sequence(int height, int width, int frames,
                                            const MapGenConfig& cfg, std::uint64_t seed) {
  if (frames < 1) throw InvalidInput("sequence needs at least one frame");
  std::vector<GeneratedMap> seq;
  seq.reserve(static_cast<std::size_t>(frames));
  seq.push_back(generate_initial_map(height, width, cfg, mix_seed(seed, 0)));
  for (int t = 1; t < frames; ++t)
    seq.push_back(update_map(seq.back(), cfg, mix_seed(seed, static_cast<std::uint64_t>(t))));
  return seq;
}

}  // namespace lrc::qmap
