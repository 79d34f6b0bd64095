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

#include "lrc/model.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>
#include <string>

#include "lrc/entropy.hpp"
#include "lrc/error.hpp"
#include "lrc/qmap.hpp"
#include "lrc/seed.hpp"

namespace lrc::model {

namespace F = torch::nn::functional;

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_int(int v) {
  int n = 0;
  while ((1 << n) < v) ++n;
  return n;
}

torch::nn::Conv2d conv(int in, int out, int kernel, int stride = 1) {
  return torch::nn::Conv2d(
      torch::nn::Conv2dOptions(in, out, kernel).stride(stride).padding(kernel / 2));
}

torch::nn::ConvTranspose2d up2(int in, int out) {
  return torch::nn::ConvTranspose2d(
      torch::nn::ConvTranspose2dOptions(in, out, 4).stride(2).padding(1));
}

struct ResBlockImpl : torch::nn::Module {
  explicit ResBlockImpl(int channels)
      : a(register_module("a", conv(channels, channels, 3))),
        b(register_module("b", conv(channels, channels, 3))) {}

  torch::Tensor forward(const torch::Tensor& x) {
    return x + b->forward(torch::gelu(a->forward(x)));
  }

  torch::nn::Conv2d a, b;
};
TORCH_MODULE(ResBlock);

PriorParams split_prior(const torch::Tensor& raw, double sigma_min, double omega_min) {
  auto parts = raw.chunk(3, 1);
  return {parts[0], sigma_min + F::softplus(parts[1]), omega_min + F::softplus(parts[2])};
}

torch::Tensor uniform_noise(const torch::Tensor& like, std::optional<std::uint64_t> seed,
                            int level) {
  if (!seed) return torch::rand_like(like) - 0.5;
  auto gen = at::make_generator<at::CPUGeneratorImpl>(mix_seed(*seed, level));
  return torch::rand(like.sizes(), gen, like.options()) - 0.5;
}

}  // namespace

void CodecConfig::validate() const {
  if (levels < 2) throw ConfigError("codec needs at least 2 levels");
  if (static_cast<int>(channels.size()) != levels ||
      static_cast<int>(latent_channels.size()) != levels)
    throw ConfigError("channel lists must have one entry per level");
  for (int i = 0; i < levels; ++i)
    if (channels[i] <= 0 || latent_channels[i] <= 0) throw ConfigError("channel counts must be positive");
  if (!is_power_of_two(base_downsample) || base_downsample < 2)
    throw ConfigError("base downsample must be a power of two >= 2");
  if (!(sigma_min > 0.0) || !(omega_min > 0.0)) throw ConfigError("sigma_min and omega_min must be positive");
}

int CodecConfig::pad_multiple() const { return std::max(32, downsample(levels - 1)); }

CodecConfig mini_config() {
  CodecConfig cfg;
  cfg.levels = 2;
  cfg.channels = {6, 8};
  cfg.latent_channels = {3, 4};
  return cfg;
}

Quantized scale_quantize(const torch::Tensor& y, const torch::Tensor& omega,
                         const torch::Tensor& mu, QuantMode mode, const torch::Tensor& noise) {
  if (y.sizes() != omega.sizes() || y.sizes() != mu.sizes())
    throw InvalidInput("scale_quantize: y, omega and mu must share a shape");
  const torch::Tensor v = (y - mu) / omega;
  const torch::Tensor k = torch::round(v);
  Quantized q;
  q.symbols = k.detach().to(torch::kInt32);
  if (mode == QuantMode::kCode) {
    q.centered = k;
    q.y_hat = k * omega + mu;
    return q;
  }
  const torch::Tensor u = noise.defined() ? noise : torch::rand_like(v) - 0.5;
  q.centered = v + u;
  q.y_hat = mode == QuantMode::kRelaxed ? q.centered * omega + mu
                                        : (v + (k - v).detach()) * omega + mu;
  return q;
}

torch::Tensor gaussian_bits(const torch::Tensor& centered, const torch::Tensor& sigma_tilde) {
  // Mass of [|v| - 1/2, |v| + 1/2] taken from the lower tail to keep
  // precision far from the mean.
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const torch::Tensor v = centered.abs();
  const torch::Tensor hi = 0.5 * torch::erfc((v - 0.5) / sigma_tilde * inv_sqrt2);
  const torch::Tensor lo = 0.5 * torch::erfc((v + 0.5) / sigma_tilde * inv_sqrt2);
  return -torch::log2(torch::clamp_min(hi - lo, entropy::kProbabilityFloor));
}

torch::Tensor support_half_width(const torch::Tensor& sigma_tilde) {
  return torch::clamp(torch::ceil(sigma_tilde * 8.0), 1.0,
                      static_cast<double>(entropy::kMaxHalfWidth));
}

torch::Tensor FrameOutput::total_bits() const {
  torch::Tensor total = torch::zeros({}, bits.front().options());
  for (const auto& b : bits) total = total + b.sum();
  return total;
}

torch::Tensor pad_to_multiple(const torch::Tensor& x, int multiple, bool replicate) {
  const std::int64_t h = x.size(-2), w = x.size(-1);
  const std::int64_t ph = (multiple - h % multiple) % multiple;
  const std::int64_t pw = (multiple - w % multiple) % multiple;
  if (ph == 0 && pw == 0) return x;
  const bool reflect = !replicate && ph < h && pw < w;
  F::PadFuncOptions opts({0, pw, 0, ph});
  if (reflect) {
    opts.mode(torch::kReflect);
  } else {
    opts.mode(torch::kReplicate);
  }
  return F::pad(x, opts);
}

torch::Tensor simulate_signaled_map(const torch::Tensor& m) {
  const std::int64_t h = m.size(-2), w = m.size(-1);
  const torch::Tensor padded = pad_to_multiple(m, qmap::kSignalFactor, true);
  const torch::Tensor coarse = F::avg_pool2d(padded, F::AvgPool2dFuncOptions(qmap::kSignalFactor));
  const torch::Tensor up = F::interpolate(
      coarse, F::InterpolateFuncOptions()
                  .size(std::vector<std::int64_t>{padded.size(-2), padded.size(-1)})
                  .mode(torch::kBilinear)
                  .align_corners(false));
  return up.index({torch::indexing::Slice(), torch::indexing::Slice(),
                   torch::indexing::Slice(0, h), torch::indexing::Slice(0, w)});
}

CodecImpl::CodecImpl(CodecConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const int L = cfg_.levels;
  const auto& C = cfg_.channels;
  const auto& Z = cfg_.latent_channels;
  const int qp = cfg_.qmap_prior ? 1 : 0;
  levels_.resize(L);
  for (int l = 0; l < L; ++l) {
    Level& lv = levels_[l];
    const std::string p = "level" + std::to_string(l) + "_";
    torch::nn::Sequential enc;
    if (l == 0) {
      int in = cfg_.qmap_input ? 4 : 3;
      const int steps = log2_int(cfg_.base_downsample);
      for (int s = 0; s < steps; ++s) {
        enc->push_back(conv(in, C[0], s == 0 ? 5 : 3, 2));
        if (s + 1 < steps) enc->push_back(torch::nn::GELU());
        in = C[0];
      }
    } else {
      enc->push_back(conv(C[l - 1], C[l], 3, 2));
      enc->push_back(torch::nn::GELU());
    }
    enc->push_back(ResBlock(C[l]));
    lv.encode = register_module(p + "encode", enc);

    const int ctx_in = C[l] + qp + (l + 1 < L ? C[l] : 0);
    lv.context = register_module(
        p + "context", torch::nn::Sequential(conv(ctx_in, C[l], 3), torch::nn::GELU(), ResBlock(C[l])));
    if (l + 1 < L) {
      lv.up = register_module(p + "up", up2(C[l + 1], C[l]));
      lv.prior = register_module(p + "prior", conv(C[l], 3 * Z[l], 3));
    }
    lv.posterior = register_module(
        p + "posterior",
        torch::nn::Sequential(conv(2 * C[l], C[l], 3), torch::nn::GELU(), conv(C[l], Z[l], 3)));
    lv.fuse = register_module(
        p + "fuse", torch::nn::Sequential(conv(C[l] + Z[l], C[l], 3), torch::nn::GELU(), ResBlock(C[l])));
    lv.temporal_bias = register_parameter(p + "temporal_bias", torch::zeros({C[l]}));
  }

  torch::nn::Sequential synth;
  const int steps = log2_int(cfg_.base_downsample);
  for (int s = 0; s < steps; ++s) {
    const bool last = s + 1 == steps;
    synth->push_back(up2(C[0], last ? 3 : C[0]));
    if (!last) synth->push_back(torch::nn::GELU());
  }
  synthesis_ = register_module("synthesis", synth);

  const int zt = Z[L - 1];
  top_mu_ = register_parameter("top_mu", torch::zeros({zt}));
  // softplus^-1(1): unit scale at initialization.
  top_sigma_raw_ = register_parameter("top_sigma_raw", torch::full({zt}, std::log(std::expm1(1.0))));
  top_omega_raw_ = register_parameter("top_omega_raw", torch::zeros({zt}));
}

TemporalState CodecImpl::init_state(std::int64_t batch, std::int64_t height,
                                    std::int64_t width) const {
  if (batch <= 0 || height <= 0 || width <= 0) throw InvalidInput("init_state needs positive sizes");
  const int mult = cfg_.pad_multiple();
  const std::int64_t hp = (height + mult - 1) / mult * mult;
  const std::int64_t wp = (width + mult - 1) / mult * mult;
  TemporalState s;
  s.height = height;
  s.width = width;
  for (int l = 0; l < cfg_.levels; ++l) {
    const int ds = cfg_.downsample(l);
    if (hp % ds != 0 || wp % ds != 0) throw ComputationError("padded size not divisible by level downsample");
    const torch::Tensor& b = levels_[l].temporal_bias;
    s.buffers.push_back(b.view({1, -1, 1, 1}).expand({batch, b.size(0), hp / ds, wp / ds}));
  }
  return s;
}

PriorParams CodecImpl::top_prior(const torch::Tensor& like_ctx) const {
  const std::int64_t b = like_ctx.size(0), h = like_ctx.size(2), w = like_ctx.size(3);
  auto expand = [&](const torch::Tensor& p) { return p.view({1, -1, 1, 1}).expand({b, p.size(0), h, w}); };
  return {expand(top_mu_), expand(cfg_.sigma_min + F::softplus(top_sigma_raw_)),
          expand(cfg_.omega_min + F::softplus(top_omega_raw_))};
}

FrameOutput CodecImpl::encode_frame(const torch::Tensor& x, const torch::Tensor& m,
                                    const torch::Tensor& m_signal, const TemporalState& state,
                                    QuantMode mode, std::optional<std::uint64_t> noise_seed) {
  if (x.dim() != 4 || x.size(1) != 3) throw InvalidInput("frame must be (B, 3, H, W)");
  if (m.dim() != 4 || m.size(1) != 1 || m.size(0) != x.size(0) || m.size(2) != x.size(2) ||
      m.size(3) != x.size(3) || m_signal.sizes() != m.sizes())
    throw InvalidInput("quality maps must be (B, 1, H, W) matching the frame");
  if (x.size(2) != state.height || x.size(3) != state.width || x.size(0) != state.buffers[0].size(0))
    throw InvalidInput("temporal state does not match the frame size");
  const int mult = cfg_.pad_multiple();
  const torch::Tensor xp = pad_to_multiple(x, mult, false);
  torch::Tensor input = xp;
  if (cfg_.qmap_input) input = torch::cat({xp, pad_to_multiple(m, mult, true)}, 1);
  std::vector<torch::Tensor> features;
  torch::Tensor f = input;
  for (auto& lv : levels_) {
    f = lv.encode->forward(f);
    features.push_back(f);
  }
  return run_levels(&features, pad_to_multiple(m_signal, mult, true), state, mode, noise_seed,
                    nullptr);
}

FrameOutput CodecImpl::decode_frame(const SymbolSource& source, const torch::Tensor& m_signal,
                                    const TemporalState& state) {
  if (m_signal.dim() != 4 || m_signal.size(2) != state.height || m_signal.size(3) != state.width)
    throw InvalidInput("signaled map does not match the temporal state");
  return run_levels(nullptr, pad_to_multiple(m_signal, cfg_.pad_multiple(), true), state,
                    QuantMode::kCode, std::nullopt, &source);
}

FrameOutput CodecImpl::decode_frame(const std::vector<torch::Tensor>& symbols,
                                    const torch::Tensor& m_signal, const TemporalState& state) {
  if (static_cast<int>(symbols.size()) != cfg_.levels)
    throw StreamError(StreamErrc::kShapeMismatch, 0, "latent level count mismatch");
  const SymbolSource source = [&](int level, const PriorParams&) { return symbols[level]; };
  return decode_frame(source, m_signal, state);
}

FrameOutput CodecImpl::run_levels(const std::vector<torch::Tensor>* features,
                                  const torch::Tensor& m_signal, const TemporalState& state,
                                  QuantMode mode, std::optional<std::uint64_t> noise_seed,
                                  const SymbolSource* source) {
  const int L = cfg_.levels;
  FrameOutput out;
  out.latents.resize(L);
  out.priors.resize(L);
  out.bits.resize(L);
  std::vector<torch::Tensor> h(L);
  for (int l = L - 1; l >= 0; --l) {
    Level& lv = levels_[l];
    std::vector<torch::Tensor> parts{state.buffers[l]};
    if (cfg_.qmap_prior)
      parts.push_back(F::avg_pool2d(m_signal, F::AvgPool2dFuncOptions(cfg_.downsample(l))));
    if (l + 1 < L) parts.push_back(lv.up->forward(h[l + 1]));
    const torch::Tensor ctx = lv.context->forward(torch::cat(parts, 1));
    const PriorParams prior = l + 1 == L
                                  ? top_prior(ctx)
                                  : split_prior(lv.prior->forward(ctx), cfg_.sigma_min, cfg_.omega_min);
    const torch::Tensor sigma_tilde = prior.sigma_tilde();

    Quantized q;
    if (features) {
      const torch::Tensor y = lv.posterior->forward(torch::cat({(*features)[l], ctx}, 1));
      if (mode == QuantMode::kCode) {
        const torch::Tensor half = support_half_width(sigma_tilde);
        const torch::Tensor k = torch::clamp(torch::round((y - prior.mu) / prior.omega), -half, half);
        q.symbols = k.to(torch::kInt32);
      } else {
        q = scale_quantize(y, prior.omega, prior.mu, mode, uniform_noise(y, noise_seed, l));
      }
    } else {
      torch::Tensor k = (*source)(l, prior);
      if (!k.defined() || k.sizes() != prior.mu.sizes())
        throw StreamError(StreamErrc::kShapeMismatch, 0,
                          "level " + std::to_string(l) + " symbols do not match the prior shape");
      q.symbols = k.to(torch::kInt32);
    }
    if (mode == QuantMode::kCode) {
      q.centered = q.symbols.to(prior.mu.scalar_type());
      q.y_hat = q.centered * prior.omega + prior.mu;
      out.bits[l] = gaussian_bits(q.centered.to(torch::kFloat64), sigma_tilde.to(torch::kFloat64));
    } else {
      out.bits[l] = gaussian_bits(q.centered, sigma_tilde);
    }
    h[l] = lv.fuse->forward(torch::cat({ctx, q.y_hat}, 1));
    out.latents[l] = std::move(q);
    out.priors[l] = prior;
  }
  // Saturated so the frame-to-frame recurrence stays bounded.
  out.state.buffers.clear();
  for (const auto& f : h) out.state.buffers.push_back(torch::tanh(f));
  out.state.t = state.t + 1;
  out.state.height = state.height;
  out.state.width = state.width;
  using torch::indexing::Slice;
  out.reconstruction = torch::clamp(synthesis_->forward(h[0]), 0.0, 1.0)
                           .index({Slice(), Slice(), Slice(0, state.height), Slice(0, state.width)});
  return out;
}

std::int64_t CodecImpl::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& p : parameters()) n += p.numel();
  return n;
}

}  // namespace lrc::model
