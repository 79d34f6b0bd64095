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
#include <optional>
#include <vector>

namespace lrc::model {

struct CodecConfig {
  int levels = 3;
  std::vector<int> channels{32, 64, 96};
  std::vector<int> latent_channels{16, 24, 32};
  /// Level l runs at 1 / (base_downsample * 2^l) of the padded input.
  int base_downsample = 4;
  /// Quality map concatenated to the frame at the encoder input.
  bool qmap_input = true;
  /// Pooled signaled map fed to every level's context (both ends).
  bool qmap_prior = true;
  double sigma_min = 0.05;
  double omega_min = 1e-3;

  /// Throws ConfigError.
  void validate() const;
  int downsample(int level) const { return base_downsample << level; }
  /// Inputs are padded to a multiple of this.
  int pad_multiple() const;
  friend bool operator==(const CodecConfig&, const CodecConfig&) = default;
};

/// ≤ 50 k parameters; used for finite-difference checks.
CodecConfig mini_config();

enum class QuantMode {
  kTrain,    // noise on the rate path, straight-through rounding for distortion
  kRelaxed,  // noise on both paths (smooth; for gradient checks)
  kCode,     // hard rounding, symbols clamped to the coded support
};

struct PriorParams {
  torch::Tensor mu;
  torch::Tensor sigma;
  torch::Tensor omega;

  torch::Tensor sigma_tilde() const { return sigma / omega; }
};

struct Quantized {
  torch::Tensor y_hat;     // distortion path, latent units
  torch::Tensor centered;  // value whose likelihood is charged: (y - mu)/omega (+ noise)
  torch::Tensor symbols;   // round((y - mu)/omega), int32
};

/// k = round((y - mu)/omega), y_hat = k * omega + mu in code mode. `noise`
/// is U(-0.5, 0.5) of y's shape; drawn with torch::rand_like if undefined.
Quantized scale_quantize(const torch::Tensor& y, const torch::Tensor& omega,
                         const torch::Tensor& mu, QuantMode mode,
                         const torch::Tensor& noise = {});

/// -log2 of the discretized Gaussian mass of `centered` under scale
/// sigma_tilde, floored at 2^-16. Differentiable.
torch::Tensor gaussian_bits(const torch::Tensor& centered, const torch::Tensor& sigma_tilde);

/// Elementwise entropy::support_half_width.
torch::Tensor support_half_width(const torch::Tensor& sigma_tilde);

struct TemporalState {
  std::vector<torch::Tensor> buffers;  // per level, (B, C_l, Hp/ds_l, Wp/ds_l)
  std::int64_t t = 0;
  std::int64_t height = 0;  // unpadded frame size
  std::int64_t width = 0;
};

struct FrameOutput {
  std::vector<Quantized> latents;     // per level
  std::vector<PriorParams> priors;    // per level
  std::vector<torch::Tensor> bits;    // per level, per element
  torch::Tensor reconstruction;       // (B, 3, H, W) in [0, 1]
  TemporalState state;                // after this frame

  torch::Tensor total_bits() const;
};

/// Decoder-side symbol provider: level index and its priors to an int32
/// symbol tensor of the prior's shape.
using SymbolSource = std::function<torch::Tensor(int level, const PriorParams& prior)>;

class CodecImpl : public torch::nn::Module {
 public:
  explicit CodecImpl(CodecConfig cfg = {});

  const CodecConfig& config() const { return cfg_; }

  /// Buffers from the learned biases; dims from the padded frame size.
  TemporalState init_state(std::int64_t batch, std::int64_t height, std::int64_t width) const;

  /// x: (B, 3, H, W), m: (B, 1, H, W) encoder-side map, m_signal: the
  /// decoder-side map of the same shape. `noise_seed` fixes the relaxation
  /// noise (train/relaxed modes).
  FrameOutput encode_frame(const torch::Tensor& x, const torch::Tensor& m,
                           const torch::Tensor& m_signal, const TemporalState& state,
                           QuantMode mode,
                           std::optional<std::uint64_t> noise_seed = std::nullopt);

  /// Uses only the symbols, the signaled map and the state.
  FrameOutput decode_frame(const SymbolSource& source, const torch::Tensor& m_signal,
                           const TemporalState& state);
  FrameOutput decode_frame(const std::vector<torch::Tensor>& symbols,
                           const torch::Tensor& m_signal, const TemporalState& state);

  std::int64_t parameter_count() const;

 private:
  struct Level {
    torch::nn::Sequential encode{nullptr};
    torch::nn::Sequential context{nullptr};
    torch::nn::ConvTranspose2d up{nullptr};  // from level + 1; absent at the top
    torch::nn::Conv2d prior{nullptr};        // absent at the top
    torch::nn::Sequential posterior{nullptr};
    torch::nn::Sequential fuse{nullptr};
    torch::Tensor temporal_bias;
  };

  FrameOutput run_levels(const std::vector<torch::Tensor>* features,
                         const torch::Tensor& m_signal, const TemporalState& state,
                         QuantMode mode, std::optional<std::uint64_t> noise_seed,
                         const SymbolSource* source);
  PriorParams top_prior(const torch::Tensor& like_ctx) const;

  CodecConfig cfg_;
  std::vector<Level> levels_;
  torch::nn::Sequential synthesis_{nullptr};
  torch::Tensor top_mu_, top_sigma_raw_, top_omega_raw_;
};
TORCH_MODULE(Codec);

/// Decoder-side map as seen during training: 16x block means, bilinear
/// back to full size. (B, 1, H, W) in, same shape out; differentiable.
torch::Tensor simulate_signaled_map(const torch::Tensor& m);

/// Right/bottom padding to `multiple`: reflect where possible, replicate
/// otherwise.
torch::Tensor pad_to_multiple(const torch::Tensor& x, int multiple, bool replicate);

}  // namespace lrc::model
