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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <torch/torch.h>

#include "lrc/checkpoint.hpp"
#include "lrc/codec.hpp"
#include "lrc/entropy.hpp"
#include "lrc/error.hpp"
#include "lrc/metrics.hpp"
#include "lrc/qmap.hpp"

namespace py = pybind11;
using namespace lrc;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

qmap::QualityMap to_map(const FloatArray& a) {
  if (a.ndim() != 2) throw InvalidInput("quality map must be a 2-D array");
  return qmap::QualityMap(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                          std::vector<float>(a.data(), a.data() + a.size()));
}

py::array_t<float> from_map(const qmap::QualityMap& m) {
  py::array_t<float> out({m.height(), m.width()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

// (H, W, 3) float array in [0, 1] <-> (1, 3, H, W) tensor.
torch::Tensor to_frame(const FloatArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw InvalidInput("frames must be (H, W, 3) arrays");
  io::Image img{static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), 3,
                std::vector<float>(a.data(), a.data() + a.size())};
  return codec::to_tensor(img);
}

py::array_t<float> from_frame(const torch::Tensor& t) {
  const io::Image img = codec::to_image(t);
  py::array_t<float> out({img.height, img.width, 3});
  std::copy(img.data.begin(), img.data.end(), out.mutable_data());
  return out;
}

class PyCodec {
 public:
  explicit PyCodec(const std::string& path) : loaded_(model::load_checkpoint(path)) { loaded_.codec->eval(); }

  py::bytes encode(const std::vector<FloatArray>& frames, const std::vector<FloatArray>& maps) {
    std::vector<torch::Tensor> xs;
    std::vector<qmap::QualityMap> ms;
    for (const auto& f : frames) xs.push_back(to_frame(f));
    for (const auto& m : maps) ms.push_back(to_map(m));
    const auto enc = codec::encode_sequence(*loaded_.codec, xs, ms);
    return {reinterpret_cast<const char*>(enc.bytes.data()), enc.bytes.size()};
  }

  std::vector<py::array_t<float>> decode(const py::bytes& stream) {
    const std::string s = stream;
    const auto dec = codec::decode_sequence(
        *loaded_.codec, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    std::vector<py::array_t<float>> out;
    for (const auto& f : dec.frames) out.push_back(from_frame(f.output.reconstruction));
    return out;
  }

  std::int64_t parameter_count() const { return loaded_.codec->parameter_count(); }
  int levels() const { return loaded_.codec->config().levels; }
  std::int64_t train_step() const { return loaded_.meta.step; }

 private:
  model::LoadedCheckpoint loaded_;
};

}  // namespace

PYBIND11_MODULE(_lrcvc, m) {
  m.doc() = "Learned video coding with spatial quality maps";

  py::register_exception<StreamError>(m, "StreamError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);

  m.def("lambda_of", [](double level) { return qmap::lambda_of(level); }, py::arg("level"));
  m.def("level_for_lambda", [](double lambda) { return qmap::level_for_lambda(lambda); }, py::arg("lam"));
  m.def(
      "lambda_map",
      [](const FloatArray& q) {
        const auto lm = qmap::lambda_map(to_map(q));
        py::array_t<double> out({lm.height, lm.width});
        std::copy(lm.values.begin(), lm.values.end(), out.mutable_data());
        return out;
      },
      py::arg("qmap"));
  m.def(
      "generate_maps",
      [](int height, int width, int frames, std::uint64_t seed) {
        std::vector<py::array_t<float>> out;
        for (const auto& g : qmap::generate_sequence(height, width, frames, qmap::MapGenConfig{}, seed))
          out.push_back(from_map(g.map));
        return out;
      },
      py::arg("height"), py::arg("width"), py::arg("frames"), py::arg("seed"));
  m.def(
      "encode_qmap",
      [](const FloatArray& q) {
        const auto bytes = qmap::encode_qmap(to_map(q));
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("qmap"));
  m.def(
      "decode_qmap",
      [](const py::bytes& payload, int height, int width) {
        const std::string s = payload;
        return from_map(
            qmap::decode_qmap(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()), height, width));
      },
      py::arg("payload"), py::arg("height"), py::arg("width"));
  m.def(
      "psnr",
      [](const FloatArray& a, const FloatArray& b) {
        if (a.ndim() != 3 || a.shape(0) != b.shape(0) || a.shape(1) != b.shape(1) || a.shape(2) != b.shape(2))
          throw InvalidInput("psnr expects two (H, W, C) arrays of equal shape");
        return eval::psnr(std::span(a.data(), a.size()), std::span(b.data(), b.size()), static_cast<int>(a.shape(0)),
                          static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2)));
      },
      py::arg("reference"), py::arg("test"));
  m.def(
      "bd_rate",
      [](const std::vector<std::pair<double, double>>& ref, const std::vector<std::pair<double, double>>& test) {
        auto curve = [](const auto& pts) {
          eval::RdCurve c;
          for (const auto& [bpp, psnr] : pts) c.points.push_back({bpp, psnr, ""});
          return c;
        };
        return eval::bd_rate(curve(ref), curve(test));
      },
      py::arg("reference"), py::arg("test"), "Points are (bpp, psnr) pairs; returns percent.");
  m.def(
      "coded_bits",
      [](const std::vector<std::int32_t>& symbols, const std::vector<double>& sigma_tilde) {
        const auto bytes = entropy::encode_plane({symbols, sigma_tilde});
        return 8 * bytes.size();
      },
      py::arg("symbols"), py::arg("sigma_tilde"));

  py::class_<PyCodec>(m, "Codec")
      .def(py::init<const std::string&>(), py::arg("checkpoint"))
      .def("encode", &PyCodec::encode, py::arg("frames"), py::arg("maps"))
      .def("decode", &PyCodec::decode, py::arg("stream"))
      .def_property_readonly("parameter_count", &PyCodec::parameter_count)
      .def_property_readonly("levels", &PyCodec::levels)
      .def_property_readonly("train_step", &PyCodec::train_step);
}
