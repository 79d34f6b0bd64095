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

#include "lrc/checkpoint.hpp"

#include <boost/crc.hpp>
#include "json.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lrc/error.hpp"

namespace lrc::model {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'L', 'R', 'C', 'K'};

json config_to_json(const CodecConfig& c) {
  return {{"levels", c.levels},
          {"channels", c.channels},
          {"latent_channels", c.latent_channels},
          {"base_downsample", c.base_downsample},
          {"qmap_input", c.qmap_input},
          {"qmap_prior", c.qmap_prior},
          {"sigma_min", c.sigma_min},
          {"omega_min", c.omega_min}};
}

CodecConfig config_from_json(const json& j) {
  CodecConfig c;
  c.levels = j.at("levels").get<int>();
  c.channels = j.at("channels").get<std::vector<int>>();
  c.latent_channels = j.at("latent_channels").get<std::vector<int>>();
  c.base_downsample = j.at("base_downsample").get<int>();
  c.qmap_input = j.at("qmap_input").get<bool>();
  c.qmap_prior = j.at("qmap_prior").get<bool>();
  c.sigma_min = j.at("sigma_min").get<double>();
  c.omega_min = j.at("omega_min").get<double>();
  c.validate();
  return c;
}

json meta_to_json(const CheckpointMeta& m) {
  return {{"step", m.step},
          {"stage_frames", m.stage_frames},
          {"stage_ends", m.stage_ends},
          {"train_seconds", m.train_seconds},
          {"seed", m.seed},
          {"note", m.note}};
}

CheckpointMeta meta_from_json(const json& j) {
  CheckpointMeta m;
  m.step = j.at("step").get<std::int64_t>();
  m.stage_frames = j.at("stage_frames").get<std::vector<int>>();
  m.stage_ends = j.at("stage_ends").get<std::vector<std::int64_t>>();
  m.train_seconds = j.at("train_seconds").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.note = j.value("note", "");
  return m;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v >> 8));
    u8(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : buf(b) {}
  std::span<const std::uint8_t> take(std::size_t n) {
    if (buf.size() - pos < n) throw StreamError(StreamErrc::kTruncated, buf.size(), "checkpoint truncated");
    auto s = buf.subspan(pos, n);
    pos += n;
    return s;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() {
    auto s = take(2);
    return static_cast<std::uint16_t>(s[0] << 8 | s[1]);
  }
  std::uint32_t u32() {
    const std::uint32_t hi = u16();
    return hi << 16 | u16();
  }
  std::span<const std::uint8_t> buf;
  std::size_t pos = 0;
};

std::uint32_t crc32(std::span<const std::uint8_t> b) {
  boost::crc_32_type crc;
  crc.process_bytes(b.data(), b.size());
  return crc.checksum();
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(CodecImpl& codec, const CheckpointMeta& meta) {
  static_assert(std::endian::native == std::endian::little, "weights are stored little-endian");
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  const std::string text =
      json{{"config", config_to_json(codec.config())}, {"meta", meta_to_json(meta)}}.dump();
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text.data(), text.size());
  const auto params = codec.named_parameters(true);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& item : params) {
    const std::string& name = item.key();
    const torch::Tensor t = item.value().detach().to(torch::kFloat32).contiguous();
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.u8(static_cast<std::uint8_t>(t.dim()));
    for (auto d : t.sizes()) w.u32(static_cast<std::uint32_t>(d));
    w.bytes(t.data_ptr<float>(), static_cast<std::size_t>(t.numel()) * sizeof(float));
  }
  w.u32(crc32(w.out));
  return std::move(w.out);
}

LoadedCheckpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (std::memcmp(r.take(4).data(), kMagic, 4) != 0)
    throw StreamError(StreamErrc::kBadMagic, 0, "not a checkpoint (expected LRCK)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw StreamError(StreamErrc::kVersionMismatch, 4,
                      "checkpoint version " + std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  if (bytes.size() < 12) throw StreamError(StreamErrc::kTruncated, bytes.size(), "checkpoint truncated");
  const std::size_t body = bytes.size() - 4;
  const auto tail = bytes.subspan(body);
  const std::uint32_t stored = std::uint32_t{tail[0]} << 24 | std::uint32_t{tail[1]} << 16 |
                               std::uint32_t{tail[2]} << 8 | tail[3];
  if (crc32(bytes.first(body)) != stored)
    throw StreamError(StreamErrc::kChecksumMismatch, body, "checkpoint checksum mismatch");
  r.buf = bytes.first(body);

  const std::uint32_t n = r.u32();
  const auto text = r.take(n);
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw StreamError(StreamErrc::kCorruptPayload, 12, std::string("checkpoint header: ") + e.what());
  }
  LoadedCheckpoint out;
  try {
    out.codec = Codec(config_from_json(j.at("config")));
    out.meta = meta_from_json(j.at("meta"));
  } catch (const json::exception& e) {
    throw StreamError(StreamErrc::kCorruptPayload, 12, std::string("checkpoint header: ") + e.what());
  }

  auto params = out.codec->named_parameters(true);
  const std::uint32_t count = r.u32();
  if (count != params.size())
    throw StreamError(StreamErrc::kShapeMismatch, r.pos, "checkpoint parameter count mismatch");
  torch::NoGradGuard no_grad;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t at = r.pos;
    const auto name_bytes = r.take(r.u16());
    const std::string name(name_bytes.begin(), name_bytes.end());
    torch::Tensor* target = params.find(name);
    if (!target) throw StreamError(StreamErrc::kShapeMismatch, at, "unknown parameter " + name);
    std::vector<std::int64_t> dims(r.u8());
    for (auto& d : dims) d = r.u32();
    if (target->sizes() != torch::IntArrayRef(dims))
      throw StreamError(StreamErrc::kShapeMismatch, at, "shape mismatch for " + name);
    const auto data = r.take(static_cast<std::size_t>(target->numel()) * sizeof(float));
    torch::Tensor t = torch::empty(dims, torch::kFloat32);
    std::memcpy(t.data_ptr<float>(), data.data(), data.size());
    target->copy_(t);
  }
  if (r.pos != r.buf.size()) throw StreamError(StreamErrc::kTrailingData, r.pos, "bytes after checkpoint tensors");
  return out;
}

void save_checkpoint(const std::string& path, CodecImpl& codec, const CheckpointMeta& meta) {
  const auto bytes = serialize_checkpoint(codec, meta);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InvalidInput("cannot write " + path);
  }
  std::rename(tmp.c_str(), path.c_str());
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open checkpoint " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace lrc::model
