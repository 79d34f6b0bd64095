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

#include "lrc/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lrc/bitstream.hpp"
#include "lrc/error.hpp"
#include "lrc/image_io.hpp"
#include "lrc/seed.hpp"

namespace lrc::eval {

namespace F = torch::nn::functional;

std::vector<double> bit_heatmap(const std::vector<torch::Tensor>& level_bits,
                                const model::CodecConfig& cfg, int height, int width) {
  if (static_cast<int>(level_bits.size()) != cfg.levels) throw InvalidInput("one bits tensor per level expected");
  std::vector<double> heat(static_cast<std::size_t>(height) * width, 0.0);
  for (int l = 0; l < cfg.levels; ++l) {
    const torch::Tensor b = level_bits[l].detach().to(torch::kFloat64).sum(1)[0].contiguous();
    const int ds = cfg.downsample(l);
    const auto h = b.size(0), w = b.size(1);
    if (h * ds < height || w * ds < width) throw InvalidInput("level grid does not cover the frame");
    const double* p = b.data_ptr<double>();
    const double share = 1.0 / (ds * ds);
    for (std::int64_t by = 0; by < h; ++by)
      for (std::int64_t bx = 0; bx < w; ++bx) {
        const double v = p[by * w + bx] * share;
        for (int dy = 0; dy < ds; ++dy) {
          const std::int64_t y = std::min<std::int64_t>(by * ds + dy, height - 1);
          for (int dx = 0; dx < ds; ++dx) {
            const std::int64_t x = std::min<std::int64_t>(bx * ds + dx, width - 1);
            heat[static_cast<std::size_t>(y) * width + x] += v;
          }
        }
      }
  }
  return heat;
}

ClipEval evaluate_clip(model::CodecImpl& codec, const std::vector<torch::Tensor>& frames,
                       const std::vector<qmap::QualityMap>& maps,
                       const std::vector<std::uint8_t>* mask, bool verify) {
  if (frames.empty()) throw InvalidInput("clip has no frames");
  const codec::EncodedSequence enc = codec::encode_sequence(codec, frames, maps);
  const int H = static_cast<int>(frames[0].size(2)), W = static_cast<int>(frames[0].size(3));
  const double pixels = static_cast<double>(H) * W;
  const int L = codec.config().levels;
  const double shared = 8.0 * entropy::kHeaderBytes / static_cast<double>(frames.size());
  const double framing = 32.0 * (1 + L);
  std::vector<std::uint8_t> outside;
  if (mask) {
    if (mask->size() != static_cast<std::size_t>(H) * W) throw InvalidInput("mask size mismatch");
    outside.resize(mask->size());
    for (std::size_t i = 0; i < mask->size(); ++i) outside[i] = (*mask)[i] ? 0 : 1;
  }

  ClipEval out;
  out.stream_bytes = enc.bytes.size();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const codec::CodedFrame& cf = enc.frames[t];
    FrameMetrics fm;
    fm.frame = static_cast<int>(t);
    fm.bpp_latent = cf.latent_bits / pixels;
    fm.bpp_qmap = cf.qmap_bits / pixels;
    fm.bpp_total = (cf.latent_bits + cf.qmap_bits + framing + shared) / pixels;
    fm.bpp_estimated = cf.estimated_bits / pixels;
    const io::Image x = codec::to_image(frames[t]);
    const io::Image y = codec::to_image(cf.output.reconstruction);
    fm.mse = squared_error(x.data, y.data, H, W, 3).mse();
    fm.psnr = psnr_from_mse(fm.mse);
    auto heat = bit_heatmap(cf.output.bits, codec.config(), H, W);
    if (mask) {
      const std::span<const std::uint8_t> in(*mask), out_mask(outside);
      fm.psnr_in = psnr(x.data, y.data, H, W, 3, in);
      fm.psnr_out = psnr(x.data, y.data, H, W, 3, out_mask);
      double si = 0, so = 0;
      std::size_t ni = 0, no = 0;
      for (std::size_t i = 0; i < heat.size(); ++i) {
        if ((*mask)[i]) {
          si += heat[i];
          ++ni;
        } else {
          so += heat[i];
          ++no;
        }
      }
      fm.heat_in = si / static_cast<double>(ni);
      fm.heat_out = so / static_cast<double>(no);
    }
    out.frames.push_back(fm);
    out.heatmaps.push_back(std::move(heat));
    out.reconstructions.push_back(cf.output.reconstruction);
  }
  if (verify) {
    const codec::DecodedSequence dec = codec::decode_sequence(codec, enc.bytes);
    if (dec.frames.size() != frames.size()) throw ComputationError("decoded frame count differs");
    for (std::size_t t = 0; t < frames.size(); ++t)
      if (!torch::equal(dec.frames[t].output.reconstruction, enc.frames[t].output.reconstruction))
        throw ComputationError("decoder reconstruction differs at frame " + std::to_string(t));
  }
  return out;
}

std::vector<double> default_levels() {
  std::vector<double> v;
  for (int i = 0; i <= 20; ++i) v.push_back(i / 20.0);
  return v;
}

RdCurve sweep_uniform(model::CodecImpl& codec, const std::vector<std::vector<torch::Tensor>>& clips,
                      const std::vector<double>& levels, std::vector<FrameMetrics>* rows) {
  if (levels.empty() || clips.empty()) throw InvalidInput("sweep needs at least one level and one clip");
  RdCurve curve;
  curve.label = "uniform";
  for (double level : levels) {
    double bpp_sum = 0.0, psnr_sum = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < clips.size(); ++c) {
      const auto& frames = clips[c];
      const auto m = qmap::uniform_map(static_cast<int>(frames[0].size(2)),
                                       static_cast<int>(frames[0].size(3)), level);
      ClipEval e = evaluate_clip(codec, frames, std::vector<qmap::QualityMap>(frames.size(), m));
      for (auto& fm : e.frames) {
        fm.clip = static_cast<int>(c);
        fm.level = level;
        bpp_sum += fm.bpp_total;
        psnr_sum += fm.psnr;
        ++n;
        if (rows) rows->push_back(fm);
      }
    }
    std::ostringstream label;
    label << "m=" << level;
    curve.points.push_back({bpp_sum / static_cast<double>(n), psnr_sum / static_cast<double>(n), label.str()});
  }
  return curve;
}

double clip_objective(const ClipEval& eval, double lambda) {
  double sum = 0.0;
  for (const auto& fm : eval.frames) sum += fm.bpp_total + lambda * fm.mse;
  return sum / static_cast<double>(eval.frames.size());
}

namespace {

torch::Tensor upsample_grid(const torch::Tensor& g, std::int64_t height, std::int64_t width) {
  const std::int64_t hp = g.size(2) * qmap::kSignalFactor, wp = g.size(3) * qmap::kSignalFactor;
  using torch::indexing::Slice;
  return F::interpolate(g, F::InterpolateFuncOptions()
                               .size(std::vector<std::int64_t>{hp, wp})
                               .mode(torch::kBilinear)
                               .align_corners(false))
      .index({Slice(), Slice(), Slice(0, height), Slice(0, width)});
}

struct FrameTrial {
  double objective;
  codec::CodedFrame coded;
};

FrameTrial code_trial(model::CodecImpl& codec, const torch::Tensor& x, const qmap::QualityMap& m,
                      const model::TemporalState& state, double lambda) {
  codec::CodedFrame cf = codec::encode_frame(codec, x, m, state);
  const double pixels = static_cast<double>(x.size(2) * x.size(3));
  const io::Image a = codec::to_image(x), b = codec::to_image(cf.output.reconstruction);
  const double mse = squared_error(a.data, b.data, static_cast<int>(x.size(2)), static_cast<int>(x.size(3)), 3).mse();
  return {(cf.latent_bits + cf.qmap_bits) / pixels + lambda * mse, std::move(cf)};
}

}  // namespace

OptimizeResult optimize_qmap(model::CodecImpl& codec, const std::vector<torch::Tensor>& frames,
                             double lambda_target, const OptimizeOptions& options) {
  if (!(lambda_target > 0.0)) throw InvalidInput("lambda target must be positive");
  if (frames.empty()) throw InvalidInput("clip has no frames");
  if (options.steps < 0 || !(options.step_size > 0.0) || options.check_every < 1 || options.candidates.empty())
    throw InvalidInput("invalid optimizer options");
  const int H = static_cast<int>(frames[0].size(2)), W = static_cast<int>(frames[0].size(3));
  const double pixels = static_cast<double>(H) * W;
  codec.eval();

  OptimizeResult result;
  result.best_uniform_objective = std::numeric_limits<double>::infinity();
  double nearest = std::numeric_limits<double>::infinity();
  for (double level : options.candidates) {
    const ClipEval e = evaluate_clip(codec, frames, std::vector<qmap::QualityMap>(frames.size(), qmap::uniform_map(H, W, level)));
    const double obj = clip_objective(e, lambda_target);
    if (obj < result.best_uniform_objective) {
      result.best_uniform_objective = obj;
      result.best_uniform_level = level;
    }
    const double gap = std::fabs(std::log(qmap::lambda_of(level)) - std::log(lambda_target));
    if (gap < nearest) {
      nearest = gap;
      result.nearest_lambda_level = level;
    }
  }
  const qmap::QualityMap start = qmap::uniform_map(H, W, result.best_uniform_level);

  model::TemporalState state = codec.init_state(1, H, W);
  const auto dtype = frames[0].scalar_type();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const torch::Tensor& x = frames[t];
    FrameTrial best = code_trial(codec, x, start, state, lambda_target);
    qmap::QualityMap best_map = start;
    torch::Tensor g = torch::full({1, 1, qmap::signal_dim(H), qmap::signal_dim(W)}, result.best_uniform_level,
                                  torch::TensorOptions().dtype(dtype));
    for (int s = 0; s < options.steps; ++s) {
      g.requires_grad_(true);
      const torch::Tensor m = upsample_grid(g, H, W);
      const model::FrameOutput out = codec.encode_frame(
          x, m, m, state, model::QuantMode::kTrain,
          mix_seed(options.seed, (static_cast<std::uint64_t>(t) << 32) | static_cast<std::uint64_t>(s)));
      const torch::Tensor objective =
          out.total_bits() / pixels + lambda_target * ((x - out.reconstruction) * 255.0).square().mean();
      if (!std::isfinite(objective.item<double>()))
        throw ComputationError("map optimization diverged at frame " + std::to_string(t) + ", step " + std::to_string(s));
      const torch::Tensor grad = torch::autograd::grad({objective}, {g})[0];
      const double scale = grad.abs().max().item<double>();
      {
        torch::NoGradGuard no_grad;
        g = g.detach();
        if (scale > 0.0) g = (g - options.step_size * grad / scale).clamp(0.0, 1.0);
      }
      if ((s + 1) % options.check_every == 0 || s + 1 == options.steps) {
        torch::NoGradGuard no_grad;
        qmap::QualityMap candidate = codec::map_from_tensor(upsample_grid(g, H, W));
        FrameTrial trial = code_trial(codec, x, candidate, state, lambda_target);
        if (trial.objective < best.objective) {
          best = std::move(trial);
          best_map = std::move(candidate);
        }
      }
    }
    state = best.coded.output.state;
    result.maps.push_back(std::move(best_map));
  }

  result.objective = clip_objective(evaluate_clip(codec, frames, result.maps), lambda_target);
  if (result.objective > result.best_uniform_objective) {
    result.maps.assign(frames.size(), start);
    result.objective = result.best_uniform_objective;
    result.kept_uniform = true;
  }
  return result;
}

void write_metrics_csv(const std::string& path, const std::vector<FrameMetrics>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << "clip,frame,level,bpp_total,bpp_latent,bpp_qmap,psnr,psnr_in_region,psnr_out_region\n";
  out << std::setprecision(10);
  for (const auto& r : rows)
    out << r.clip << ',' << r.frame << ',' << r.level << ',' << r.bpp_total << ',' << r.bpp_latent << ','
        << r.bpp_qmap << ',' << r.psnr << ',' << r.psnr_in << ',' << r.psnr_out << '\n';
}

void write_curve_csv(const std::string& path, const RdCurve& curve) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << "label,bpp,psnr\n" << std::setprecision(10);
  for (const auto& p : curve.points) out << p.label << ',' << p.bpp << ',' << p.psnr << '\n';
}

void write_rd_svg(const std::string& path, const std::vector<RdCurve>& curves) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      x0 = std::min(x0, p.bpp);
      x1 = std::max(x1, p.bpp);
      y0 = std::min(y0, p.psnr);
      y1 = std::max(y1, p.psnr);
    }
  if (x0 > x1) throw InvalidInput("nothing to plot");
  if (x1 - x0 < 1e-9) x1 = x0 + 1e-3;
  if (y1 - y0 < 1e-9) y1 = y0 + 1.0;
  const double w = 640, h = 480, m = 60;
  auto px = [&](double v) { return m + (v - x0) / (x1 - x0) * (w - 2 * m); };
  auto py = [&](double v) { return h - m - (v - y0) / (y1 - y0) * (h - 2 * m); };
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n"
      << std::fixed << std::setprecision(3)
      << "<text x=\"" << w / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">bpp (" << x0 << " to " << x1 << ")</text>\n"
      << "<text x=\"15\" y=\"" << h / 2 << "\" transform=\"rotate(-90 15 " << h / 2
      << ")\" text-anchor=\"middle\">PSNR dB (" << y0 << " to " << y1 << ")</text>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* col = colors[i % 5];
    out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : curves[i].points) out << px(p.bpp) << ',' << py(p.psnr) << ' ';
    out << "\"/>\n";
    for (const auto& p : curves[i].points)
      out << "<circle cx=\"" << px(p.bpp) << "\" cy=\"" << py(p.psnr) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    out << "<text x=\"" << w - m - 100 << "\" y=\"" << m + 20 * (i + 1) << "\" fill=\"" << col << "\">"
        << curves[i].label << "</text>\n";
  }
  out << "</svg>\n";
}

void write_heatmap_image(const std::string& path, const std::vector<double>& heat, int height, int width) {
  if (heat.size() != static_cast<std::size_t>(height) * width) throw InvalidInput("heatmap size mismatch");
  const double peak = *std::max_element(heat.begin(), heat.end());
  io::Image img{height, width, 1, std::vector<float>(heat.size(), 0.0f)};
  if (peak > 0.0)
    for (std::size_t i = 0; i < heat.size(); ++i) img.data[i] = static_cast<float>(heat[i] / peak);
  io::write_image(path, img);
}

}  // namespace lrc::eval
