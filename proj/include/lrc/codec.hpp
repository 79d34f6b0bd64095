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
#include <span>
#include <vector>

#include "lrc/bitstream.hpp"
#include "lrc/entropy.hpp"
#include "lrc/image_io.hpp"
#include "lrc/model.hpp"
#include "lrc/qmap.hpp"

namespace lrc::codec {

/// (1, 3, H, W) float tensor; gray images are replicated to three channels.
torch::Tensor to_tensor(const io::Image& image);
/// (1, 3, H, W) or (3, H, W) tensor to an interleaved RGB image.
io::Image to_image(const torch::Tensor& frame);
/// (1, 1, H, W) tensor of the map values.
torch::Tensor map_tensor(const qmap::QualityMap& m, torch::ScalarType dtype = torch::kFloat32);
qmap::QualityMap map_from_tensor(const torch::Tensor& m);

/// One frame coded for real: payloads, the encoder-side network output
/// (symbols, priors, reconstruction, next state) and sizes.
struct CodedFrame {
  entropy::FramePayload payload;
  model::FrameOutput output;
  qmap::QualityMap signaled;
  double qmap_bits = 0.0;
  double latent_bits = 0.0;     // actual range-coded bits
  double estimated_bits = 0.0;  // sum of -log2 p over all symbols
};

/// Code-mode encode of frame x (1, 3, H, W) under map m.
CodedFrame encode_frame(model::CodecImpl& codec, const torch::Tensor& x, const qmap::QualityMap& m,
                        const model::TemporalState& state,
                        entropy::CoderBackend backend = entropy::CoderBackend::kReference);

/// Decoder side of encode_frame; needs only the payload and the state.
struct DecodedFrame {
  model::FrameOutput output;
  qmap::QualityMap signaled;
};
DecodedFrame decode_frame(model::CodecImpl& codec, const entropy::FramePayload& payload,
                          const model::TemporalState& state,
                          entropy::CoderBackend backend = entropy::CoderBackend::kReference);

struct EncodedSequence {
  std::vector<std::uint8_t> bytes;
  std::vector<CodedFrame> frames;
};

/// Frames (1, 3, H, W) and one map per frame; all the same size.
EncodedSequence encode_sequence(model::CodecImpl& codec, const std::vector<torch::Tensor>& frames,
                                const std::vector<qmap::QualityMap>& maps,
                                entropy::CoderBackend backend = entropy::CoderBackend::kReference);

struct DecodedSequence {
  int height = 0;
  int width = 0;
  std::vector<DecodedFrame> frames;
};

/// Throws StreamError on any container, payload or shape problem.
DecodedSequence decode_sequence(model::CodecImpl& codec, std::span<const std::uint8_t> bytes,
                                entropy::CoderBackend backend = entropy::CoderBackend::kReference);

}  // namespace lrc::codec
