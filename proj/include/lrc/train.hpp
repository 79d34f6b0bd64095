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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lrc/checkpoint.hpp"
#include "lrc/model.hpp"
#include "lrc/qmap.hpp"

namespace lrc::train {

/// alpha * exp(beta * m), elementwise.
torch::Tensor lambda_tensor(const torch::Tensor& m, double alpha = qmap::kDefaultAlpha,
                            double beta = qmap::kDefaultBeta);

/// (1 / HW) sum Lambda * mean_c (x - x_hat)^2, averaged over the batch.
/// x, x_hat: (B, C, H, W); lambda: (B, 1, H, W). Unit-agnostic: scale the
/// frames to choose the distortion units.
torch::Tensor wmse_loss(const torch::Tensor& x, const torch::Tensor& x_hat,
                        const torch::Tensor& lambda);

struct LossBreakdown {
  double rate = 0.0;  // bpp
  double wmse = 0.0;
  double total = 0.0;
  std::vector<double> level_rate;  // bpp per latent level
};

LossBreakdown total_loss(double rate_bpp, double wmse);

struct LossConfig {
  double alpha = qmap::kDefaultAlpha;
  double beta = qmap::kDefaultBeta;
  /// Frames are multiplied by this before the weighted MSE (255: 8-bit units).
  double pixel_scale = 255.0;
};

/// Mean over frames of rate + weighted MSE for a clip batch, carrying the
/// temporal state (not detached). frames: (B, T, 3, H, W); maps:
/// (B, T, 1, H, W).
struct SequenceLoss {
  torch::Tensor total;
  LossBreakdown breakdown;
};
SequenceLoss sequence_loss(model::CodecImpl& codec, const torch::Tensor& frames,
                           const torch::Tensor& maps, const LossConfig& loss,
                           model::QuantMode mode, std::uint64_t noise_seed);

// ---------------------------------------------------------------------------
// Data.

struct ClipDatasetSpec {
  enum class Source { kSynthetic, kFrameDirectory };
  Source source = Source::kSynthetic;
  std::string path;  // frame-directory root: one numbered-image folder per clip
  int clip_length = 16;
  int crop = 64;
  /// Synthetic: number of distinct clips (0 = unbounded index space).
  std::int64_t clip_count = 0;
  std::uint64_t seed = 1;
  /// Synthetic: per-axis speed bound for shapes and background, px/frame.
  double max_velocity = 1.5;

  /// Throws ConfigError.
  void validate() const;
};

/// Deterministic moving-shape clip: textured background and 2-6 textured
/// rectangles/ellipses translating with sub-pixel velocities.
/// (T, 3, crop, crop) in [0, 1].
torch::Tensor synth_clip(const ClipDatasetSpec& spec, std::int64_t index);

/// Clips from a directory tree; random temporal window and spatial crop.
class FrameDirectoryDataset {
 public:
  /// Throws ConfigError if the root has no usable clip or a clip is
  /// shorter than `min_frames` or smaller than the crop.
  FrameDirectoryDataset(const std::string& root, int min_frames, int crop);

  std::size_t size() const { return clips_.size(); }
  /// (frames, 3, crop, crop).
  torch::Tensor sample(int frames, std::uint64_t seed) const;

 private:
  std::vector<std::vector<std::string>> clips_;
  int crop_;
};

// ---------------------------------------------------------------------------
// Schedule.

struct ScheduleStage {
  std::int64_t end_step = 0;  // global step at which the stage ends
  int frames = 3;
  std::string dataset = "synthetic";  // "synthetic" or a frame-directory root
};

struct TrainConfig {
  std::vector<ScheduleStage> stages;
  double lr = 1e-4;
  /// Linear decay to lr * lr_final_factor over the final lr_decay_steps.
  double lr_final_factor = 1.0;
  std::int64_t lr_decay_steps = 0;
  double grad_clip = 1.0;
  int batch = 4;
  int crop = 64;
  std::uint64_t seed = 1;
  std::int64_t synthetic_clips = 0;
  double max_velocity = 1.5;
  model::CodecConfig model;
  qmap::MapGenConfig maps;
  LossConfig loss;
  std::string out_dir = ".";
  std::string log_path;  // CSV; empty disables
  int log_every = 10;

  /// Throws ConfigError.
  void validate() const;
};

/// key = value lines, '#' comments. Keys: stages (end_step x frames
/// [@dataset], comma separated), lr, lr_final_factor, lr_decay_steps,
/// grad_clip, batch, crop, seed, clips, max_velocity, levels, channels,
/// latent_channels, alpha, beta, pixel_scale, map_mix, map_delta, out,
/// log, log_every. Throws ConfigError.
TrainConfig parse_train_config(const std::string& text);
TrainConfig load_train_config(const std::string& path);

struct Batch {
  torch::Tensor frames;  // (B, T, 3, crop, crop)
  torch::Tensor maps;    // (B, T, 1, crop, crop)
};

/// Deterministic in (cfg, stage, step).
class BatchSource {
 public:
  explicit BatchSource(const TrainConfig& cfg);
  Batch make(const ScheduleStage& stage, std::int64_t step) const;

 private:
  const TrainConfig& cfg_;
  mutable std::vector<std::pair<std::string, std::shared_ptr<FrameDirectoryDataset>>> dirs_;
};

/// One optimizer update on a batch; throws TrainingAbort on a non-finite
/// loss (nothing is updated then).
LossBreakdown training_step(model::CodecImpl& codec, torch::optim::Optimizer& optimizer,
                            const Batch& batch, const TrainConfig& cfg, std::uint64_t step_seed,
                            std::int64_t step = 0, int stage = 0);

struct StepRecord {
  std::int64_t step;
  int stage;
  LossBreakdown loss;
};

struct ScheduleResult {
  std::vector<std::string> checkpoints;  // one per stage end
  model::CheckpointMeta meta;
  std::vector<StepRecord> first_steps;   // first step of every stage run
};

/// Runs the stages not yet recorded in meta (resume point: meta.step and
/// meta.stage_frames.size()) in order, saving out_dir/stage<i>.ckpt at each
/// end. A stage ending at or before the current step saves the weights as
/// they are.
ScheduleResult run_schedule(model::CodecImpl& codec, const TrainConfig& cfg,
                            model::CheckpointMeta meta = {},
                            const std::function<void(const StepRecord&)>& on_step = {});

}  // namespace lrc::train
