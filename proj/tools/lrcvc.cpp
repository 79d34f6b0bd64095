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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "lrc/checkpoint.hpp"
#include "lrc/codec.hpp"
#include "lrc/error.hpp"
#include "lrc/evaluate.hpp"
#include "lrc/image_io.hpp"
#include "lrc/qmap.hpp"
#include "lrc/rangecoder.h"
#include "lrc/train.hpp"

namespace fs = std::filesystem;
using namespace lrc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTraining = 3;
constexpr int kExitStream = 4;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("not a number list: '" + text + "'");
    }
  }
  return out;
}

std::vector<torch::Tensor> load_clip(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("frame directory not found: " + dir);
  std::vector<torch::Tensor> frames;
  for (const auto& f : io::list_frames(dir)) frames.push_back(codec::to_tensor(io::read_image(f)));
  if (frames.empty()) throw ConfigError("no frames in " + dir);
  for (const auto& f : frames)
    if (f.sizes() != frames[0].sizes()) throw ConfigError("frames in " + dir + " differ in size");
  return frames;
}

// file | uniform:<v> | rect:<x,y,w,h,v,bg>
std::vector<qmap::QualityMap> load_maps(const std::string& source, int frames, int height, int width) {
  std::vector<qmap::QualityMap> maps;
  if (source.rfind("uniform:", 0) == 0) {
    const auto v = parse_list(source.substr(8));
    if (v.size() != 1) throw ConfigError("uniform:<level> expects one value");
    maps.push_back(qmap::uniform_map(height, width, v[0]));
  } else if (source.rfind("rect:", 0) == 0) {
    const auto v = parse_list(source.substr(5));
    if (v.size() != 6) throw ConfigError("rect:<x,y,w,h,level,background> expects six values");
    const qmap::Region r{qmap::ShapeKind::kRectangle, static_cast<int>(v[0]), static_cast<int>(v[1]),
                         static_cast<int>(v[2]), static_cast<int>(v[3]), v[4]};
    maps.push_back(qmap::compose_region_map(height, width, v[5], std::span(&r, 1)));
  } else {
    if (!fs::exists(source)) throw ConfigError("quality map file not found: " + source);
    maps = qmap::read_qmap_file(source);
  }
  if (maps.size() == 1) maps.assign(static_cast<std::size_t>(frames), maps[0]);
  if (static_cast<int>(maps.size()) != frames)
    throw ConfigError("quality map source has " + std::to_string(maps.size()) + " frames, clip has " +
                      std::to_string(frames));
  for (const auto& m : maps)
    if (m.height() != height || m.width() != width) throw ConfigError("quality map size does not match the frames");
  return maps;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

model::Codec load_codec(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("checkpoint not found: " + path);
  auto loaded = model::load_checkpoint(path);
  loaded.codec->eval();
  return loaded.codec;
}

std::string frame_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04zu.png", t);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  torch::set_num_threads(1);
  CLI::App app{"Quality-map controlled neural video codec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("lrcvc 0.1.0 (range coder: ") + lrc_rc_backend_name() + ")");

  std::string config, checkpoint, frames_dir, qmap_src, out, in, levels = "", region, reference, heat_dir, plot,
      rows, mix = "0.3333333333333333,0.3333333333333334,0.3333333333333333";
  std::vector<std::string> clip_dirs;
  std::uint64_t seed = 1;
  double lambda = 0.02, delta = 0.1;
  int steps = 100, height = 256, width = 256, frames = 1, clips = 1, size = 128;
  std::string resume;

  auto* train = app.add_subcommand("train", "Run the progressive training schedule");
  train->add_option("--config", config, "Training config file")->required();
  train->add_option("--checkpoint", resume, "Resume from a stage-end checkpoint");
  train->add_option("--seed", seed, "Override the config seed");

  auto* encode = app.add_subcommand("encode", "Encode a frame directory");
  encode->add_option("--checkpoint", checkpoint)->required();
  encode->add_option("--frames", frames_dir)->required();
  encode->add_option("--qmap", qmap_src, "file | uniform:<v> | rect:<x,y,w,h,v,bg>")->required();
  encode->add_option("--out", out)->required();

  auto* decode = app.add_subcommand("decode", "Decode a bitstream into PNG frames");
  decode->add_option("--checkpoint", checkpoint)->required();
  decode->add_option("--in", in)->required();
  decode->add_option("--out", out, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Per-frame metrics for one clip");
  eval->add_option("--checkpoint", checkpoint);
  eval->add_option("--frames", frames_dir)->required();
  eval->add_option("--qmap", qmap_src, "Quality map source when coding");
  eval->add_option("--decoded", reference, "Compare against these frames instead of coding");
  eval->add_option("--region", region, "x,y,w,h for regional PSNR");
  eval->add_option("--heatmaps", heat_dir, "Write bit heatmaps here");
  eval->add_option("--out", out, "Metrics CSV")->required();

  auto* sweep = app.add_subcommand("sweep", "Uniform-map rate-distortion sweep");
  sweep->add_option("--checkpoint", checkpoint)->required();
  sweep->add_option("--frames", clip_dirs, "Clip directories")->required();
  sweep->add_option("--levels", levels, "Comma-separated levels (default 0,0.05,...,1)");
  sweep->add_option("--out", out, "Curve CSV")->required();
  sweep->add_option("--rows", rows, "Per-frame metrics CSV");
  sweep->add_option("--plot", plot, "RD plot (SVG)");

  auto* genmap = app.add_subcommand("genmap", "Generate a constrained-random map sequence");
  genmap->add_option("--height", height);
  genmap->add_option("--width", width);
  genmap->add_option("--seed", seed);
  genmap->add_option("--mix", mix, "smooth,sharp,constant weights");
  genmap->add_option("--frames", frames);
  genmap->add_option("--delta", delta);
  genmap->add_option("--out", out, ".qmap (raw float) or .png/.pgm (first frame)")->required();

  auto* optimize = app.add_subcommand("optimize-map", "Optimize per-frame maps for a lambda target");
  optimize->add_option("--checkpoint", checkpoint)->required();
  optimize->add_option("--frames", frames_dir)->required();
  optimize->add_option("--lambda", lambda)->required();
  optimize->add_option("--steps", steps);
  optimize->add_option("--seed", seed);
  optimize->add_option("--out", out, "Optimized maps (.qmap)")->required();

  auto* synth = app.add_subcommand("synth", "Write synthetic clips as PNG directories");
  synth->add_option("--out", out)->required();
  synth->add_option("--clips", clips);
  synth->add_option("--frames", frames);
  synth->add_option("--size", size);
  synth->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*train) {
      train::TrainConfig cfg = train::load_train_config(config);
      if (train->count("--seed")) cfg.seed = seed;
      model::Codec codec(cfg.model);
      model::CheckpointMeta meta;
      if (!resume.empty()) {
        auto loaded = model::load_checkpoint(resume);
        codec = loaded.codec;
        meta = loaded.meta;
      }
      const auto result = train::run_schedule(*codec, cfg, meta, [](const train::StepRecord& r) {
        if (r.step % 100 == 0)
          std::cerr << "step " << r.step << " stage " << r.stage << " bpp " << r.loss.rate << " wmse "
                    << r.loss.wmse << " total " << r.loss.total << '\n';
      });
      for (const auto& c : result.checkpoints) std::cout << c << '\n';
    } else if (*encode) {
      auto codec = load_codec(checkpoint);
      const auto clip = load_clip(frames_dir);
      const auto maps = load_maps(qmap_src, static_cast<int>(clip.size()), static_cast<int>(clip[0].size(2)),
                                  static_cast<int>(clip[0].size(3)));
      const auto enc = codec::encode_sequence(*codec, clip, maps, entropy::CoderBackend::kLinked);
      std::ofstream f(out, std::ios::binary | std::ios::trunc);
      if (!f) throw ConfigError("cannot write " + out);
      f.write(reinterpret_cast<const char*>(enc.bytes.data()), static_cast<std::streamsize>(enc.bytes.size()));
      const double pixels = static_cast<double>(clip[0].size(2) * clip[0].size(3) * clip.size());
      std::cout << enc.bytes.size() << " bytes, " << 8.0 * enc.bytes.size() / pixels << " bpp\n";
    } else if (*decode) {
      auto codec = load_codec(checkpoint);
      const auto bytes = read_bytes(in);
      const auto dec = codec::decode_sequence(*codec, bytes, entropy::CoderBackend::kLinked);
      fs::create_directories(out);
      for (std::size_t t = 0; t < dec.frames.size(); ++t)
        io::write_image((fs::path(out) / frame_name(t)).string(), codec::to_image(dec.frames[t].output.reconstruction));
      std::cout << dec.frames.size() << " frames, " << dec.width << "x" << dec.height << '\n';
    } else if (*eval) {
      const auto clip = load_clip(frames_dir);
      const int H = static_cast<int>(clip[0].size(2)), W = static_cast<int>(clip[0].size(3));
      std::vector<std::uint8_t> mask;
      if (!region.empty()) {
        const auto v = parse_list(region);
        if (v.size() != 4) throw ConfigError("--region expects x,y,w,h");
        const qmap::Region r{qmap::ShapeKind::kRectangle, static_cast<int>(v[0]), static_cast<int>(v[1]),
                             static_cast<int>(v[2]), static_cast<int>(v[3]), 1.0};
        mask = qmap::region_mask(H, W, std::span(&r, 1));
      }
      std::vector<eval::FrameMetrics> rows_out;
      if (!reference.empty()) {
        const auto other = load_clip(reference);
        if (other.size() != clip.size() || other[0].sizes() != clip[0].sizes())
          throw ConfigError("decoded clip does not match the source clip");
        for (std::size_t t = 0; t < clip.size(); ++t) {
          const auto a = codec::to_image(clip[t]), b = codec::to_image(other[t]);
          eval::FrameMetrics fm;
          fm.frame = static_cast<int>(t);
          fm.mse = eval::squared_error(a.data, b.data, H, W, 3).mse();
          fm.psnr = eval::psnr_from_mse(fm.mse);
          if (!mask.empty()) {
            std::vector<std::uint8_t> outside(mask.size());
            for (std::size_t i = 0; i < mask.size(); ++i) outside[i] = !mask[i];
            fm.psnr_in = eval::psnr(a.data, b.data, H, W, 3, std::span<const std::uint8_t>(mask));
            fm.psnr_out = eval::psnr(a.data, b.data, H, W, 3, std::span<const std::uint8_t>(outside));
          }
          rows_out.push_back(fm);
        }
      } else {
        if (checkpoint.empty() || qmap_src.empty()) throw ConfigError("eval needs --checkpoint and --qmap, or --decoded");
        auto codec = load_codec(checkpoint);
        const auto maps = load_maps(qmap_src, static_cast<int>(clip.size()), H, W);
        const auto e = eval::evaluate_clip(*codec, clip, maps, mask.empty() ? nullptr : &mask, true);
        rows_out = e.frames;
        for (std::size_t t = 0; t < rows_out.size(); ++t) rows_out[t].level = maps[t].mean();
        if (!heat_dir.empty()) {
          fs::create_directories(heat_dir);
          for (std::size_t t = 0; t < e.heatmaps.size(); ++t)
            eval::write_heatmap_image((fs::path(heat_dir) / frame_name(t)).string(), e.heatmaps[t], H, W);
        }
      }
      eval::write_metrics_csv(out, rows_out);
      for (const auto& r : rows_out)
        std::cout << "frame " << r.frame << " psnr " << r.psnr << " bpp " << r.bpp_total << '\n';
    } else if (*sweep) {
      auto codec = load_codec(checkpoint);
      std::vector<std::vector<torch::Tensor>> clips_in;
      for (const auto& d : clip_dirs) clips_in.push_back(load_clip(d));
      const auto lv = levels.empty() ? eval::default_levels() : parse_list(levels);
      for (double v : lv)
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("levels must lie in [0, 1]");
      std::vector<eval::FrameMetrics> frame_rows;
      const auto curve = eval::sweep_uniform(*codec, clips_in, lv, &frame_rows);
      eval::write_curve_csv(out, curve);
      if (!rows.empty()) eval::write_metrics_csv(rows, frame_rows);
      if (!plot.empty()) eval::write_rd_svg(plot, {curve});
      for (const auto& p : curve.points) std::cout << p.label << " bpp " << p.bpp << " psnr " << p.psnr << '\n';
    } else if (*genmap) {
      qmap::MapGenConfig cfg;
      const auto w = parse_list(mix);
      if (w.size() != 3) throw ConfigError("--mix expects three weights");
      cfg.mix_smooth = w[0];
      cfg.mix_sharp = w[1];
      cfg.mix_constant = w[2];
      cfg.delta = delta;
      cfg.validate();
      if (frames < 1) throw ConfigError("--frames must be positive");
      const auto seq = qmap::generate_sequence(height, width, frames, cfg, seed);
      std::vector<qmap::QualityMap> maps;
      for (const auto& g : seq) maps.push_back(g.map);
      const auto ext = fs::path(out).extension().string();
      if (ext == ".png" || ext == ".pgm") {
        qmap::write_qmap_image(out, maps[0]);
      } else {
        qmap::write_qmap_raw(out, maps);
      }
    } else if (*optimize) {
      auto codec = load_codec(checkpoint);
      const auto clip = load_clip(frames_dir);
      eval::OptimizeOptions opts;
      opts.steps = steps;
      opts.seed = seed;
      const auto r = eval::optimize_qmap(*codec, clip, lambda, opts);
      qmap::write_qmap_raw(out, r.maps);
      std::cout << "objective " << r.objective << " best uniform " << r.best_uniform_objective << " (m="
                << r.best_uniform_level << ")" << (r.kept_uniform ? " kept uniform" : "") << '\n';
    } else if (*synth) {
      train::ClipDatasetSpec spec;
      spec.clip_length = frames;
      spec.crop = size;
      spec.seed = seed;
      spec.validate();
      for (int c = 0; c < clips; ++c) {
        const auto clip = train::synth_clip(spec, c);
        char name[32];
        std::snprintf(name, sizeof name, "clip_%04d", c);
        const fs::path dir = fs::path(out) / name;
        fs::create_directories(dir);
        for (int t = 0; t < frames; ++t)
          io::write_image((dir / frame_name(static_cast<std::size_t>(t))).string(), codec::to_image(clip[t]));
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TrainingAbort& e) {
    std::cerr << "training aborted: " << e.what() << '\n';
    return kExitTraining;
  } catch (const StreamError& e) {
    std::cerr << "stream error at byte " << e.offset() << ": " << e.what() << '\n';
    return kExitStream;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
