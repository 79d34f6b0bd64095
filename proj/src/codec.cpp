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

#include "lrc/codec.hpp"

#include <cstring>
#include <string>

#include "lrc/error.hpp"

namespace lrc::codec {

namespace {

entropy::SymbolPlane plane_of(const torch::Tensor& symbols, const model::PriorParams& prior) {
  const torch::Tensor k = symbols.contiguous().to(torch::kInt32);
  const torch::Tensor s = prior.sigma_tilde().detach().contiguous().to(torch::kFloat64);
  entropy::SymbolPlane plane;
  plane.symbols.assign(k.data_ptr<std::int32_t>(), k.data_ptr<std::int32_t>() + k.numel());
  plane.sigma_tilde.assign(s.data_ptr<double>(), s.data_ptr<double>() + s.numel());
  return plane;
}

std::vector<double> sigma_tilde_of(const model::PriorParams& prior) {
  const torch::Tensor s = prior.sigma_tilde().detach().contiguous().to(torch::kFloat64);
  return {s.data_ptr<double>(), s.data_ptr<double>() + s.numel()};
}

}  // namespace

torch::Tensor to_tensor(const io::Image& image) {
  if (image.channels != 1 && image.channels != 3) throw InvalidInput("frames must have 1 or 3 channels");
  torch::Tensor t = torch::from_blob(const_cast<float*>(image.data.data()),
                                     {image.height, image.width, image.channels}, torch::kFloat32)
                        .permute({2, 0, 1})
                        .clone();
  if (image.channels == 1) t = t.expand({3, image.height, image.width}).clone();
  return t.unsqueeze(0);
}

io::Image to_image(const torch::Tensor& frame) {
  torch::Tensor t = frame.dim() == 4 ? frame[0] : frame;
  if (t.dim() != 3 || t.size(0) != 3) throw InvalidInput("expected a (3, H, W) frame");
  t = t.detach().to(torch::kFloat32).permute({1, 2, 0}).contiguous();
  io::Image img;
  img.height = static_cast<int>(t.size(0));
  img.width = static_cast<int>(t.size(1));
  img.channels = 3;
  img.data.assign(t.data_ptr<float>(), t.data_ptr<float>() + t.numel());
  return img;
}

torch::Tensor map_tensor(const qmap::QualityMap& m, torch::ScalarType dtype) {
  const auto v = m.values();
  return torch::from_blob(const_cast<float*>(v.data()), {1, 1, m.height(), m.width()}, torch::kFloat32)
      .to(dtype)
      .clone();
}

qmap::QualityMap map_from_tensor(const torch::Tensor& m) {
  const torch::Tensor t = m.detach().to(torch::kFloat32).contiguous().clamp(0.0, 1.0);
  const auto h = static_cast<int>(t.size(-2)), w = static_cast<int>(t.size(-1));
  return {h, w, std::vector<float>(t.data_ptr<float>(), t.data_ptr<float>() + t.numel())};
}

CodedFrame encode_frame(model::CodecImpl& codec, const torch::Tensor& x, const qmap::QualityMap& m,
                        const model::TemporalState& state, entropy::CoderBackend backend) {
  torch::NoGradGuard no_grad;
  const auto dtype = x.scalar_type();
  CodedFrame cf;
  cf.payload.qmap = qmap::encode_qmap(m);
  cf.signaled = qmap::decode_qmap(cf.payload.qmap, m.height(), m.width());
  cf.qmap_bits = 8.0 * static_cast<double>(cf.payload.qmap.size());
  cf.output = codec.encode_frame(x, map_tensor(m, dtype), map_tensor(cf.signaled, dtype), state,
                                 model::QuantMode::kCode);
  for (std::size_t l = 0; l < cf.output.latents.size(); ++l) {
    const auto plane = plane_of(cf.output.latents[l].symbols, cf.output.priors[l]);
    cf.payload.levels.push_back(entropy::encode_plane(plane, backend));
    cf.latent_bits += 8.0 * static_cast<double>(cf.payload.levels.back().size());
  }
  cf.estimated_bits = cf.output.total_bits().item<double>();
  return cf;
}

DecodedFrame decode_frame(model::CodecImpl& codec, const entropy::FramePayload& payload,
                          const model::TemporalState& state, entropy::CoderBackend backend) {
  torch::NoGradGuard no_grad;
  if (static_cast<int>(payload.levels.size()) != codec.config().levels)
    throw StreamError(StreamErrc::kShapeMismatch, 0, "frame level count does not match the checkpoint");
  DecodedFrame out;
  out.signaled = qmap::decode_qmap(payload.qmap, static_cast<int>(state.height),
                                   static_cast<int>(state.width));
  const auto dtype = state.buffers.front().scalar_type();
  const model::SymbolSource source = [&](int level, const model::PriorParams& prior) {
    const auto symbols = entropy::decode_plane(payload.levels[level], sigma_tilde_of(prior), backend);
    torch::Tensor k = torch::empty(prior.mu.sizes(), torch::kInt32);
    std::memcpy(k.data_ptr<std::int32_t>(), symbols.data(), symbols.size() * sizeof(std::int32_t));
    return k;
  };
  out.output = codec.decode_frame(source, map_tensor(out.signaled, dtype), state);
  return out;
}

EncodedSequence encode_sequence(model::CodecImpl& codec, const std::vector<torch::Tensor>& frames,
                                const std::vector<qmap::QualityMap>& maps,
                                entropy::CoderBackend backend) {
  if (frames.size() != maps.size()) throw InvalidInput("one quality map per frame is required");
  if (frames.size() > 0xFFFF) throw InvalidInput("too many frames for one stream");
  EncodedSequence out;
  entropy::Bitstream stream;
  stream.level_count = static_cast<std::uint8_t>(codec.config().levels);
  stream.qmap_signaled = true;
  if (!frames.empty()) {
    const auto h = frames[0].size(2), w = frames[0].size(3);
    if (h > 0xFFFF || w > 0xFFFF) throw InvalidInput("frame too large for the container");
    stream.height = static_cast<std::uint16_t>(h);
    stream.width = static_cast<std::uint16_t>(w);
    model::TemporalState state = codec.init_state(1, h, w);
    for (std::size_t t = 0; t < frames.size(); ++t) {
      if (frames[t].size(2) != h || frames[t].size(3) != w || maps[t].height() != h || maps[t].width() != w)
        throw InvalidInput("all frames and maps must share one size");
      out.frames.push_back(encode_frame(codec, frames[t], maps[t], state, backend));
      state = out.frames.back().output.state;
      stream.frames.push_back(out.frames.back().payload);
    }
  }
  out.bytes = entropy::pack_bitstream(stream);
  return out;
}

DecodedSequence decode_sequence(model::CodecImpl& codec, std::span<const std::uint8_t> bytes,
                                entropy::CoderBackend backend) {
  const entropy::Bitstream stream = entropy::unpack_bitstream(bytes);
  if (stream.level_count != codec.config().levels)
    throw StreamError(StreamErrc::kShapeMismatch, 12, "stream level count does not match the checkpoint");
  if (!stream.frames.empty() && !stream.qmap_signaled)
    throw StreamError(StreamErrc::kCorruptPayload, 5, "stream carries no quality map");
  DecodedSequence out;
  out.height = stream.height;
  out.width = stream.width;
  if (stream.frames.empty()) return out;
  if (stream.height == 0 || stream.width == 0)
    throw StreamError(StreamErrc::kHeaderCorrupt, 6, "zero frame size");
  const auto dtype = codec.parameters().front().scalar_type();
  model::TemporalState state = codec.init_state(1, stream.height, stream.width);
  for (auto& b : state.buffers) b = b.to(dtype);
  for (const auto& payload : stream.frames) {
    out.frames.push_back(decode_frame(codec, payload, state, backend));
    state = out.frames.back().output.state;
  }
  return out;
}

}  // namespace lrc::codec
