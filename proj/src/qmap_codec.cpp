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

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "lrc/cdf.hpp"
#include "lrc/error.hpp"
#include "lrc/image_io.hpp"
#include "lrc/qmap.hpp"
#include "lrc/range_coder.hpp"

namespace lrc::qmap {
namespace {

using Eigen::MatrixXd;

// Bilinear weights from a coarse axis of n samples (centers at 16 i + 7.5)
// onto the fine samples, edge-clamped.
MatrixXd upsample_matrix(int n, int pixels) {
  MatrixXd u = MatrixXd::Zero(pixels, n);
  for (int p = 0; p < pixels; ++p) {
    const double pos = std::clamp((p + 0.5) / kSignalFactor - 0.5, 0.0, n - 1.0);
    const int i0 = std::min(static_cast<int>(pos), n - 1);
    const int i1 = std::min(i0 + 1, n - 1);
    const double f = pos - i0;
    u(p, i0) += 1.0 - f;
    u(p, i1) += f;
  }
  return u;
}

// Block means over 16-pixel runs (the last block may be partial).
MatrixXd pooling_matrix(int n, int pixels) {
  MatrixXd p = MatrixXd::Zero(n, pixels);
  for (int i = 0; i < n; ++i) {
    const int lo = i * kSignalFactor;
    const int hi = std::min(lo + kSignalFactor, pixels);
    for (int q = lo; q < hi; ++q) p(i, q) = 1.0 / (hi - lo);
  }
  return p;
}

constexpr std::array<double, 8> kDpcmScales = {0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
constexpr int kMaxResidual = kSignalLevels - 1;

const entropy::CdfTable& dpcm_table(int mode) {
  static const std::array<entropy::CdfTable, kDpcmScales.size()> tables = [] {
    std::array<entropy::CdfTable, kDpcmScales.size()> t;
    for (std::size_t s = 0; s < kDpcmScales.size(); ++s) {
      std::vector<double> pmf(2 * kMaxResidual + 1);
      for (int r = -kMaxResidual; r <= kMaxResidual; ++r)
        pmf[r + kMaxResidual] = std::exp(-std::abs(r) / kDpcmScales[s]);
      t[s] = entropy::quantize_pmf(pmf, -kMaxResidual);
    }
    return t;
  }();
  return tables[static_cast<std::size_t>(mode - 1)];
}

int predict(const std::vector<int>& q, int gw, int i) {
  if (i % gw > 0) return q[i - 1];
  if (i >= gw) return q[i - gw];
  return kSignalLevels / 2;
}

std::vector<std::uint8_t> pack_codes(const std::vector<int>& q) {
  std::vector<std::uint8_t> out((q.size() * kSignalBits + 7) / 8, 0);
  std::size_t bit = 0;
  for (int v : q)
    for (int b = kSignalBits - 1; b >= 0; --b, ++bit)
      if ((v >> b) & 1) out[bit / 8] |= static_cast<std::uint8_t>(0x80 >> (bit % 8));
  return out;
}

}  // namespace

std::vector<double> signal_grid(const QualityMap& m) {
  const int gh = signal_dim(m.height());
  const int gw = signal_dim(m.width());
  const MatrixXd pr = pooling_matrix(gh, m.height());
  const MatrixXd pc = pooling_matrix(gw, m.width());
  MatrixXd img(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) img(y, x) = m.at(y, x);
  const MatrixXd target = pr * img * pc.transpose();
  // Block means of U_r C U_c^T equal A_r C A_c^T with A = P U.
  const MatrixXd ar = pr * upsample_matrix(gh, m.height());
  const MatrixXd ac = pc * upsample_matrix(gw, m.width());
  const MatrixXd left = ar.partialPivLu().solve(target);
  const MatrixXd coarse = ac.partialPivLu().solve(left.transpose()).transpose();
  std::vector<double> out(static_cast<std::size_t>(gh) * gw);
  for (int i = 0; i < gh; ++i)
    for (int j = 0; j < gw; ++j) out[static_cast<std::size_t>(i) * gw + j] = std::clamp(coarse(i, j), 0.0, 1.0);
  return out;
}

std::vector<float> upsample_grid(std::span<const double> grid, int grid_h, int grid_w,
                                 int height, int width) {
  if (grid.size() != static_cast<std::size_t>(grid_h) * grid_w)
    throw InvalidInput("grid size does not match its dimensions");
  const MatrixXd ur = upsample_matrix(grid_h, height);
  const MatrixXd uc = upsample_matrix(grid_w, width);
  const MatrixXd c = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      grid.data(), grid_h, grid_w);
  const MatrixXd up = ur * c * uc.transpose();
  std::vector<float> out(static_cast<std::size_t>(height) * width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[static_cast<std::size_t>(y) * width + x] = static_cast<float>(std::clamp(up(y, x), 0.0, 1.0));
  return out;
}

std::vector<std::uint8_t> encode_qmap(const QualityMap& m) {
  const int gw = signal_dim(m.width());
  const std::vector<double> grid = signal_grid(m);
  std::vector<int> q(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    q[i] = std::min(kSignalLevels - 1, static_cast<int>(std::floor(grid[i] * kSignalLevels)));

  std::vector<std::uint8_t> best = pack_codes(q);
  best.insert(best.begin(), 0);

  std::vector<std::int32_t> residuals(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    residuals[i] = q[i] - predict(q, gw, static_cast<int>(i));
  for (int mode = 1; mode <= static_cast<int>(kDpcmScales.size()); ++mode) {
    const entropy::CdfTable& table = dpcm_table(mode);
    rc::Encoder enc;
    for (std::int32_t r : residuals) {
      const auto bin = static_cast<std::size_t>(r - table.min_symbol);
      enc.encode(table.cdf[bin], table.freq(bin));
    }
    std::vector<std::uint8_t> coded = enc.finish();
    if (coded.size() + 1 < best.size()) {
      coded.insert(coded.begin(), static_cast<std::uint8_t>(mode));
      best = std::move(coded);
    }
  }
  return best;
}

QualityMap decode_qmap(std::span<const std::uint8_t> payload, int height, int width) {
  if (height <= 0 || width <= 0) throw InvalidInput("decode_qmap needs positive dimensions");
  const int gh = signal_dim(height);
  const int gw = signal_dim(width);
  const std::size_t n = static_cast<std::size_t>(gh) * gw;
  if (payload.empty()) throw StreamError(StreamErrc::kTruncated, 0, "empty qmap payload");
  const int mode = payload[0];
  std::vector<int> q(n);
  const auto body = payload.subspan(1);
  if (mode == 0) {
    const std::size_t need = (n * kSignalBits + 7) / 8;
    if (body.size() < need)
      throw StreamError(StreamErrc::kTruncated, payload.size(), "packed qmap codes truncated");
    if (body.size() > need)
      throw StreamError(StreamErrc::kTrailingData, 1 + need, "bytes after packed qmap codes");
    std::size_t bit = 0;
    for (int& v : q) {
      v = 0;
      for (int b = 0; b < kSignalBits; ++b, ++bit) v = (v << 1) | ((body[bit / 8] >> (7 - bit % 8)) & 1);
    }
  } else if (mode <= static_cast<int>(kDpcmScales.size())) {
    const entropy::CdfTable& table = dpcm_table(mode);
    try {
      rc::Decoder dec(body);
      for (std::size_t i = 0; i < n; ++i) {
        const int v = predict(q, gw, static_cast<int>(i)) + dec.decode(table);
        if (v < 0 || v >= kSignalLevels)
          throw StreamError(StreamErrc::kCorruptPayload, 0, "qmap code out of range");
        q[i] = v;
      }
      dec.finish();
    } catch (const StreamError& e) {
      throw StreamError(e.code(), 1 + e.offset(), std::string("qmap payload: ") + e.what());
    }
  } else {
    throw StreamError(StreamErrc::kCorruptPayload, 0, "unknown qmap mode " + std::to_string(mode));
  }
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = (q[i] + 0.5) / kSignalLevels;
  return QualityMap(height, width, upsample_grid(grid, gh, gw, height, width));
}

// ---------------------------------------------------------------------------

namespace {

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 2);
}
void put_u32(std::ostream& out, std::uint32_t v) {
  put_u16(out, static_cast<std::uint16_t>(v >> 16));
  put_u16(out, static_cast<std::uint16_t>(v));
}
std::uint32_t get_be(const unsigned char* p, int bytes) {
  std::uint32_t v = 0;
  for (int i = 0; i < bytes; ++i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

void write_qmap_raw(const std::string& path, std::span<const QualityMap> maps) {
  if (maps.empty()) throw InvalidInput("no maps to write");
  const int h = maps[0].height();
  const int w = maps[0].width();
  if (h > 0xFFFF || w > 0xFFFF) throw InvalidInput("map too large for the raw format");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out.write("QMAP", 4);
  put_u16(out, static_cast<std::uint16_t>(h));
  put_u16(out, static_cast<std::uint16_t>(w));
  put_u32(out, 0);
  put_u32(out, static_cast<std::uint32_t>(maps.size()));
  for (const QualityMap& m : maps) {
    if (m.height() != h || m.width() != w) throw InvalidInput("maps differ in size");
    for (float v : m.values()) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put_u32(out, bits);
    }
  }
}

std::vector<QualityMap> read_qmap_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16) throw StreamError(StreamErrc::kTruncated, bytes.size(), "QMAP header");
  if (std::memcmp(bytes.data(), "QMAP", 4) != 0) throw StreamError(StreamErrc::kBadMagic, 0, "expected QMAP");
  const int h = static_cast<int>(get_be(&bytes[4], 2));
  const int w = static_cast<int>(get_be(&bytes[6], 2));
  const std::uint32_t frames = get_be(&bytes[12], 4);
  const std::size_t per = static_cast<std::size_t>(h) * w;
  if (bytes.size() != 16 + per * 4 * frames)
    throw StreamError(bytes.size() < 16 + per * 4 * frames ? StreamErrc::kTruncated : StreamErrc::kTrailingData,
                      bytes.size(), "QMAP body size");
  std::vector<QualityMap> maps;
  for (std::uint32_t f = 0; f < frames; ++f) {
    std::vector<float> v(per);
    for (std::size_t i = 0; i < per; ++i) {
      const std::uint32_t bits = get_be(&bytes[16 + (f * per + i) * 4], 4);
      std::memcpy(&v[i], &bits, 4);
    }
    maps.emplace_back(h, w, std::move(v));
  }
  return maps;
}

void write_qmap_image(const std::string& path, const QualityMap& m) {
  io::Image img{m.height(), m.width(), 1, {m.values().begin(), m.values().end()}};
  io::write_image(path, img);
}

QualityMap read_qmap_image(const std::string& path) {
  io::Image img = io::read_image(path);
  if (img.channels != 1) throw InvalidInput(path + ": quality map images must be single-channel");
  return QualityMap(img.height, img.width, std::move(img.data));
}

std::vector<QualityMap> read_qmap_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  char magic[4] = {0};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, "QMAP", 4) == 0) return read_qmap_raw(path);
  return {read_qmap_image(path)};
}

}  // namespace lrc::qmap
