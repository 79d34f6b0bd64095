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

#include <torch/torch.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrc/codec.hpp"
#include "lrc/metrics.hpp"
#include "lrc/model.hpp"
#include "lrc/qmap.hpp"

namespace lrc::eval {

/// Spreads each latent element's bits evenly over the pixels it covers
/// (its downsample x downsample block, padding folded onto the nearest
/// frame pixel) and sums over channels and levels. Row-major H x W; the
/// sum equals the sum of level_bits.
std::vector<double> bit_heatmap(const std::vector<torch::Tensor>& level_bits,
                                const model::CodecConfig& cfg, int height, int width);

struct FrameMetrics {
  int clip = 0;
  int frame = 0;
  double level = 0.0;  // uniform level, or the lambda target
  double bpp_total = 0.0;   // this frame's share of every stream byte
  double bpp_latent = 0.0;  // range-coded latents only
  double bpp_qmap = 0.0;    // signaled map only
  double bpp_estimated = 0.0;
  double mse = 0.0;  // 8-bit scale
  double psnr = 0.0;
  double psnr_in = std::numeric_limits<double>::quiet_NaN();
  double psnr_out = std::numeric_limits<double>::quiet_NaN();
  double heat_in = std::numeric_limits<double>::quiet_NaN();   // mean bits per pixel inside
  double heat_out = std::numeric_limits<double>::quiet_NaN();  // and outside the region
};

struct ClipEval {
  std::vector<FrameMetrics> frames;
  std::vector<std::vector<double>> heatmaps;  // per frame
  std::vector<torch::Tensor> reconstructions;
  std::size_t stream_bytes = 0;
};

/// Real encode of one clip (frames are (1, 3, H, W)). With a mask (H*W,
/// nonzero inside) the regional fields are filled. With verify, the
/// stream is decoded again and compared bit for bit (ComputationError on
/// mismatch).
ClipEval evaluate_clip(model::CodecImpl& codec, const std::vector<torch::Tensor>& frames,
                       const std::vector<qmap::QualityMap>& maps,
                       const std::vector<std::uint8_t>* mask = nullptr, bool verify = false);

/// 0, 0.05, ..., 1.
std::vector<double> default_levels();

/// Mean bpp_total and PSNR over all frames of all clips, per level, in the
/// order given. Per-frame rows are appended to `rows` when provided.
RdCurve sweep_uniform(model::CodecImpl& codec, const std::vector<std::vector<torch::Tensor>>& clips,
                      const std::vector<double>& levels, std::vector<FrameMetrics>* rows = nullptr);

/// Mean over frames of bpp_total + lambda * mse.
double clip_objective(const ClipEval& eval, double lambda);

struct OptimizeOptions {
  int steps = 100;
  double step_size = 0.02;
  /// Code-mode check of the current iterate every this many steps (and at
  /// the last step); the best checked iterate is kept.
  int check_every = 10;
  std::uint64_t seed = 7;
  std::vector<double> candidates = default_levels();
};

struct OptimizeResult {
  std::vector<qmap::QualityMap> maps;
  double objective = 0.0;            // code mode, this clip
  double best_uniform_objective = 0.0;
  double best_uniform_level = 0.0;
  double nearest_lambda_level = 0.0;  // candidate whose lambda is nearest the target
  bool kept_uniform = false;          // no optimized iterate beat the uniform start
};

/// Inference-time map optimization for one clip at lambda_target (8-bit
/// MSE units): starts from the candidate uniform level with the lowest
/// code-mode objective, then per frame runs projected, max-normalized
/// gradient steps on the 16x coarse map grid under the train-mode
/// relaxation, keeping the best iterate in code mode. Throws
/// ComputationError with the step index if the objective diverges.
OptimizeResult optimize_qmap(model::CodecImpl& codec, const std::vector<torch::Tensor>& frames,
                             double lambda_target, const OptimizeOptions& options = {});

void write_metrics_csv(const std::string& path, const std::vector<FrameMetrics>& rows);
void write_curve_csv(const std::string& path, const RdCurve& curve);
/// Line plot of bpp vs PSNR.
void write_rd_svg(const std::string& path, const std::vector<RdCurve>& curves);
/// Heatmap scaled to its maximum, 8-bit gray.
void write_heatmap_image(const std::string& path, const std::vector<double>& heat, int height, int width);

}  // namespace lrc::eval
