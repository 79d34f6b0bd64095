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

#include "lrc/train.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "lrc/codec.hpp"
#include "lrc/error.hpp"
#include "lrc/image_io.hpp"
#include "lrc/seed.hpp"

namespace lrc::train {

torch::Tensor lambda_tensor(const torch::Tensor& m, double alpha, double beta) {
  return alpha * torch::exp(beta * m);
}

torch::Tensor wmse_loss(const torch::Tensor& x, const torch::Tensor& x_hat,
                        const torch::Tensor& lambda) {
  if (x.dim() != 4 || x.sizes() != x_hat.sizes())
    throw InvalidInput("wmse_loss: x and x_hat must be equal (B, C, H, W) tensors");
  if (lambda.dim() != 4 || lambda.size(0) != x.size(0) || lambda.size(1) != 1 ||
      lambda.size(2) != x.size(2) || lambda.size(3) != x.size(3))
    throw InvalidInput("wmse_loss: lambda must be (B, 1, H, W) matching the frames");
  const torch::Tensor err = (x - x_hat).square().mean(1, /*keepdim=*/true);
  return (lambda * err).mean();
}

LossBreakdown total_loss(double rate_bpp, double wmse) {
  return {rate_bpp, wmse, rate_bpp + wmse, {}};
}

SequenceLoss sequence_loss(model::CodecImpl& codec, const torch::Tensor& frames,
                           const torch::Tensor& maps, const LossConfig& loss,
                           model::QuantMode mode, std::uint64_t noise_seed) {
  if (frames.dim() != 5 || maps.dim() != 5 || frames.size(0) != maps.size(0) ||
      frames.size(1) != maps.size(1))
    throw InvalidInput("sequence_loss expects (B, T, C, H, W) frames and maps");
  const std::int64_t B = frames.size(0), T = frames.size(1);
  const std::int64_t H = frames.size(3), W = frames.size(4);
  const double pixels = static_cast<double>(B * H * W);
  model::TemporalState state = codec.init_state(B, H, W);
  torch::Tensor total = torch::zeros({}, frames.options());
  LossBreakdown bd;
  bd.level_rate.assign(codec.config().levels, 0.0);
  for (std::int64_t t = 0; t < T; ++t) {
    const torch::Tensor x = frames.select(1, t);
    const torch::Tensor m = maps.select(1, t);
    const model::FrameOutput out =
        codec.encode_frame(x, m, model::simulate_signaled_map(m), state, mode, mix_seed(noise_seed, t));
    const torch::Tensor rate = out.total_bits() / pixels;
    const torch::Tensor wmse = wmse_loss(x * loss.pixel_scale, out.reconstruction * loss.pixel_scale,
                                         lambda_tensor(m, loss.alpha, loss.beta));
    total = total + rate + wmse;
    bd.rate += rate.item<double>();
    bd.wmse += wmse.item<double>();
    for (std::size_t l = 0; l < out.bits.size(); ++l) bd.level_rate[l] += out.bits[l].sum().item<double>() / pixels;
    state = out.state;
  }
  total = total / static_cast<double>(T);
  bd.rate /= static_cast<double>(T);
  bd.wmse /= static_cast<double>(T);
  for (auto& r : bd.level_rate) r /= static_cast<double>(T);
  bd.total = total.item<double>();
  return {total, bd};
}

// ---------------------------------------------------------------------------
// Synthetic clips.

namespace {

struct Wave {
  double fx, fy, phase, sharp;
  float amp[3];
};

struct Texture {
  float base[3];
  std::vector<Wave> waves;

  void eval(double u, double v, float* rgb) const {
    for (int c = 0; c < 3; ++c) rgb[c] = base[c];
    for (const auto& w : waves) {
      const double s = std::sin(2.0 * std::numbers::pi * (w.fx * u + w.fy * v) + w.phase);
      const double g = std::tanh(w.sharp * s) / std::tanh(w.sharp);
      for (int c = 0; c < 3; ++c) rgb[c] += static_cast<float>(w.amp[c] * g);
    }
  }
};

Texture random_texture(std::mt19937_64& rng, double fmin, double fmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Texture t;
  for (float& b : t.base) b = static_cast<float>(0.15 + 0.7 * u(rng));
  const int n = 1 + static_cast<int>(u(rng) * 3);
  for (int i = 0; i < n; ++i) {
    const double f = fmin + (fmax - fmin) * u(rng);
    const double theta = 2.0 * std::numbers::pi * u(rng);
    Wave w{f * std::cos(theta), f * std::sin(theta), 2.0 * std::numbers::pi * u(rng),
           u(rng) < 0.4 ? 4.0 : 1.0, {}};
    const double a = 0.03 + 0.12 * u(rng);
    for (float& c : w.amp) c = static_cast<float>(a * (0.5 + u(rng)));
    t.waves.push_back(w);
  }
  return t;
}

struct Shape {
  bool ellipse;
  double cx, cy, hw, hh, vx, vy;
  Texture tex;

  // Coverage of the pixel centred at (px, py) at frame t, 1-pixel ramp.
  double coverage(double px, double py, double t) const {
    const double dx = px - (cx + vx * t), dy = py - (cy + vy * t);
    double d;
    if (ellipse) {
      d = (std::sqrt((dx / hw) * (dx / hw) + (dy / hh) * (dy / hh)) - 1.0) * std::min(hw, hh);
    } else {
      d = std::max(std::fabs(dx) - hw, std::fabs(dy) - hh);
    }
    return std::clamp(0.5 - d, 0.0, 1.0);
  }
};

}  // namespace

void ClipDatasetSpec::validate() const {
  if (clip_length < 1) throw ConfigError("clip length must be at least 1");
  if (crop <= 0 || crop % 32 != 0) throw ConfigError("crop must be a positive multiple of 32");
  if (clip_count < 0) throw ConfigError("clip count must be nonnegative");
  if (!(max_velocity >= 0.0)) throw ConfigError("max velocity must be nonnegative");
  if (source == Source::kFrameDirectory && path.empty()) throw ConfigError("frame-directory dataset needs a path");
}

torch::Tensor synth_clip(const ClipDatasetSpec& spec, std::int64_t index) {
  spec.validate();
  if (spec.clip_count > 0) index %= spec.clip_count;
  std::mt19937_64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(index)));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int S = spec.crop, T = spec.clip_length;
  const double vmax = spec.max_velocity;
  auto velocity = [&] { return vmax * (2.0 * u(rng) - 1.0); };

  const Texture background = random_texture(rng, 0.005, 0.08);
  const double bvx = 0.5 * velocity(), bvy = 0.5 * velocity();
  std::vector<Shape> shapes(2 + static_cast<int>(u(rng) * 5));
  for (auto& s : shapes) {
    s.ellipse = u(rng) < 0.5;
    s.hw = S * (0.08 + 0.2 * u(rng));
    s.hh = S * (0.08 + 0.2 * u(rng));
    s.cx = S * u(rng);
    s.cy = S * u(rng);
    s.vx = velocity();
    s.vy = velocity();
    s.tex = random_texture(rng, 0.02, 0.2);
  }

  torch::Tensor clip = torch::empty({T, 3, S, S}, torch::kFloat32);
  auto a = clip.accessor<float, 4>();
  float rgb[3], top[3];
  for (int t = 0; t < T; ++t) {
    for (int y = 0; y < S; ++y) {
      for (int x = 0; x < S; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        background.eval(px - bvx * t, py - bvy * t, rgb);
        for (const auto& s : shapes) {
          const double c = s.coverage(px, py, t);
          if (c <= 0.0) continue;
          s.tex.eval(px - (s.cx + s.vx * t), py - (s.cy + s.vy * t), top);
          for (int ch = 0; ch < 3; ++ch) rgb[ch] = static_cast<float>((1.0 - c) * rgb[ch] + c * top[ch]);
        }
        for (int ch = 0; ch < 3; ++ch) a[t][ch][y][x] = std::clamp(rgb[ch], 0.0f, 1.0f);
      }
    }
  }
  return clip;
}

FrameDirectoryDataset::FrameDirectoryDataset(const std::string& root, int min_frames, int crop)
    : crop_(crop) {
  if (!std::filesystem::is_directory(root)) throw ConfigError("dataset directory not found: " + root);
  for (const auto& dir : io::list_dirs(root)) {
    auto frames = io::list_frames(dir);
    if (frames.empty()) continue;
    if (static_cast<int>(frames.size()) < min_frames)
      throw ConfigError("clip " + dir + " has " + std::to_string(frames.size()) + " frames, " +
                        std::to_string(min_frames) + " required");
    const io::Image first = io::read_image(frames.front());
    if (first.height < crop || first.width < crop)
      throw ConfigError("clip " + dir + " is smaller than the crop size");
    clips_.push_back(std::move(frames));
  }
  if (clips_.empty()) throw ConfigError("no clips found under " + root);
}

torch::Tensor FrameDirectoryDataset::sample(int frames, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  const auto& clip = clips_[rng() % clips_.size()];
  if (frames > static_cast<int>(clip.size())) throw ConfigError("clip shorter than the requested length");
  const std::size_t start = rng() % (clip.size() - static_cast<std::size_t>(frames) + 1);
  std::vector<torch::Tensor> out;
  std::int64_t oy = -1, ox = -1;
  for (int t = 0; t < frames; ++t) {
    const torch::Tensor img = codec::to_tensor(io::read_image(clip[start + t]))[0];
    if (oy < 0) {
      oy = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(img.size(1) - crop_ + 1));
      ox = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(img.size(2) - crop_ + 1));
    }
    using torch::indexing::Slice;
    out.push_back(img.index({Slice(), Slice(oy, oy + crop_), Slice(ox, ox + crop_)}));
  }
  return torch::stack(out);
}

// ---------------------------------------------------------------------------
// Configuration.

void TrainConfig::validate() const {
  if (stages.empty()) throw ConfigError("training needs at least one stage");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].end_step < 0) throw ConfigError("stage end steps must be nonnegative");
    if (stages[i].frames < 1) throw ConfigError("stage frame counts must be positive");
    if (i > 0 && stages[i].end_step <= stages[i - 1].end_step)
      throw ConfigError("stage end steps must increase strictly");
    if (i > 0 && stages[i].frames < stages[i - 1].frames)
      throw ConfigError("stage frame counts must not decrease");
  }
  if (!(lr >= 0.0)) throw ConfigError("lr must be nonnegative");
  if (!(lr_final_factor > 0.0) || lr_decay_steps < 0) throw ConfigError("invalid lr decay");
  if (!(grad_clip > 0.0)) throw ConfigError("grad_clip must be positive");
  if (batch < 1) throw ConfigError("batch must be positive");
  if (crop <= 0 || crop % 32 != 0) throw ConfigError("crop must be a positive multiple of 32");
  if (!(loss.alpha > 0.0) || !(loss.beta > 0.0) || !(loss.pixel_scale > 0.0))
    throw ConfigError("alpha, beta and pixel_scale must be positive");
  if (log_every < 1) throw ConfigError("log_every must be positive");
  model.validate();
  try {
    maps.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

template <typename T>
T number(const std::string& key, const std::string& text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ConfigError("bad value for " + key + ": '" + text + "'");
  return v;
}

template <typename T>
std::vector<T> numbers(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& s : split(text, ',')) out.push_back(number<T>(key, s));
  return out;
}

}  // namespace

TrainConfig parse_train_config(const std::string& text) {
  TrainConfig cfg;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "stages") {
      cfg.stages.clear();
      for (const auto& item : split(value, ',')) {
        ScheduleStage st;
        std::string spec = item;
        if (const auto at = spec.find('@'); at != std::string::npos) {
          st.dataset = trim(spec.substr(at + 1));
          spec = trim(spec.substr(0, at));
        }
        const auto x = spec.find('x');
        if (x == std::string::npos) throw ConfigError("stage '" + item + "' must read <end_step>x<frames>");
        st.end_step = number<std::int64_t>(key, spec.substr(0, x));
        st.frames = number<int>(key, spec.substr(x + 1));
        cfg.stages.push_back(st);
      }
    } else if (key == "lr") {
      cfg.lr = number<double>(key, value);
    } else if (key == "lr_final_factor") {
      cfg.lr_final_factor = number<double>(key, value);
    } else if (key == "lr_decay_steps") {
      cfg.lr_decay_steps = number<std::int64_t>(key, value);
    } else if (key == "grad_clip") {
      cfg.grad_clip = number<double>(key, value);
    } else if (key == "batch") {
      cfg.batch = number<int>(key, value);
    } else if (key == "crop") {
      cfg.crop = number<int>(key, value);
    } else if (key == "seed") {
      cfg.seed = number<std::uint64_t>(key, value);
    } else if (key == "clips") {
      cfg.synthetic_clips = number<std::int64_t>(key, value);
    } else if (key == "max_velocity") {
      cfg.max_velocity = number<double>(key, value);
    } else if (key == "levels") {
      cfg.model.levels = number<int>(key, value);
    } else if (key == "channels") {
      cfg.model.channels = numbers<int>(key, value);
    } else if (key == "latent_channels") {
      cfg.model.latent_channels = numbers<int>(key, value);
    } else if (key == "alpha") {
      cfg.loss.alpha = number<double>(key, value);
    } else if (key == "beta") {
      cfg.loss.beta = number<double>(key, value);
    } else if (key == "pixel_scale") {
      cfg.loss.pixel_scale = number<double>(key, value);
    } else if (key == "map_mix") {
      const auto mix = numbers<double>(key, value);
      if (mix.size() != 3) throw ConfigError("map_mix needs three weights");
      cfg.maps.mix_smooth = mix[0];
      cfg.maps.mix_sharp = mix[1];
      cfg.maps.mix_constant = mix[2];
    } else if (key == "map_delta") {
      cfg.maps.delta = number<double>(key, value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "log") {
      cfg.log_path = value;
    } else if (key == "log_every") {
      cfg.log_every = number<int>(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_train_config(ss.str());
}

// ---------------------------------------------------------------------------
// Steps and schedule.

BatchSource::BatchSource(const TrainConfig& cfg) : cfg_(cfg) {}

Batch BatchSource::make(const ScheduleStage& stage, std::int64_t step) const {
  const std::uint64_t s = mix_seed(cfg_.seed, static_cast<std::uint64_t>(step));
  std::vector<torch::Tensor> frames, maps;
  std::shared_ptr<FrameDirectoryDataset> dir;
  if (stage.dataset != "synthetic") {
    for (const auto& [path, ds] : dirs_)
      if (path == stage.dataset) dir = ds;
    if (!dir) {
      dir = std::make_shared<FrameDirectoryDataset>(stage.dataset, stage.frames, cfg_.crop);
      dirs_.emplace_back(stage.dataset, dir);
    }
  }
  for (int b = 0; b < cfg_.batch; ++b) {
    const std::uint64_t clip_seed = mix_seed(s, static_cast<std::uint64_t>(b));
    if (dir) {
      frames.push_back(dir->sample(stage.frames, clip_seed));
    } else {
      ClipDatasetSpec spec;
      spec.clip_length = stage.frames;
      spec.crop = cfg_.crop;
      spec.clip_count = cfg_.synthetic_clips;
      spec.seed = cfg_.seed;
      spec.max_velocity = cfg_.max_velocity;
      frames.push_back(synth_clip(spec, static_cast<std::int64_t>(clip_seed >> 1)));
    }
    const auto seq = qmap::generate_sequence(cfg_.crop, cfg_.crop, stage.frames, cfg_.maps,
                                             mix_seed(clip_seed, 0x6d617073));
    std::vector<torch::Tensor> m;
    for (const auto& g : seq) m.push_back(codec::map_tensor(g.map)[0]);
    maps.push_back(torch::stack(m));
  }
  return {torch::stack(frames), torch::stack(maps)};
}

LossBreakdown training_step(model::CodecImpl& codec, torch::optim::Optimizer& optimizer,
                            const Batch& batch, const TrainConfig& cfg, std::uint64_t step_seed,
                            std::int64_t step, int stage) {
  codec.train();
  const auto dtype = codec.parameters().front().scalar_type();
  SequenceLoss loss = sequence_loss(codec, batch.frames.to(dtype), batch.maps.to(dtype), cfg.loss,
                                    model::QuantMode::kTrain, step_seed);
  if (!std::isfinite(loss.breakdown.total)) {
    std::ostringstream msg;
    msg << "non-finite loss at step " << step << " (stage " << stage << "): bpp " << loss.breakdown.rate
        << ", wmse " << loss.breakdown.wmse << ", level bpp";
    for (double r : loss.breakdown.level_rate) msg << ' ' << r;
    throw TrainingAbort(msg.str());
  }
  optimizer.zero_grad();
  loss.total.backward();
  const double norm = torch::nn::utils::clip_grad_norm_(codec.parameters(), cfg.grad_clip);
  if (!std::isfinite(norm)) {
    std::ostringstream msg;
    msg << "non-finite gradient at step " << step << " (stage " << stage << ")";
    for (const auto& item : codec.named_parameters())
      if (item.value().grad().defined() && !torch::isfinite(item.value().grad()).all().item<bool>())
        msg << ' ' << item.key();
    optimizer.zero_grad();
    throw TrainingAbort(msg.str());
  }
  optimizer.step();
  return loss.breakdown;
}

namespace {

double lr_at(const TrainConfig& cfg, std::int64_t step) {
  const std::int64_t end = cfg.stages.back().end_step;
  const std::int64_t start = end - cfg.lr_decay_steps;
  if (cfg.lr_decay_steps <= 0 || step < start) return cfg.lr;
  const double f = static_cast<double>(step - start) / static_cast<double>(cfg.lr_decay_steps);
  return cfg.lr * (1.0 + (cfg.lr_final_factor - 1.0) * f);
}

}  // namespace

ScheduleResult run_schedule(model::CodecImpl& codec, const TrainConfig& cfg,
                            model::CheckpointMeta meta,
                            const std::function<void(const StepRecord&)>& on_step) {
  cfg.validate();
  for (const auto& st : cfg.stages)
    if (st.dataset != "synthetic") FrameDirectoryDataset(st.dataset, st.frames, cfg.crop);
  if (!(cfg.model == codec.config())) throw ConfigError("training config does not match the model");
  std::filesystem::create_directories(cfg.out_dir);

  std::ofstream log;
  if (!cfg.log_path.empty()) {
    const bool fresh = meta.step == 0 || !std::filesystem::exists(cfg.log_path);
    log.open(cfg.log_path, fresh ? std::ios::trunc : std::ios::app);
    if (!log) throw ConfigError("cannot write log " + cfg.log_path);
    if (fresh) log << "step,stage,bpp,wmse,total\n";
  }

  BatchSource source(cfg);
  torch::optim::Adam optimizer(codec.parameters(), torch::optim::AdamOptions(cfg.lr));
  ScheduleResult result;
  meta.seed = cfg.seed;
  std::int64_t step = meta.step;
  for (std::size_t i = meta.stage_frames.size(); i < cfg.stages.size(); ++i) {
    const ScheduleStage& stage = cfg.stages[i];
    const auto t0 = std::chrono::steady_clock::now();
    bool first = true;
    for (; step < stage.end_step; ++step) {
      for (auto& group : optimizer.param_groups())
        static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr_at(cfg, step));
      const Batch batch = source.make(stage, step);
      const StepRecord rec{step, static_cast<int>(i),
                           training_step(codec, optimizer, batch, cfg,
                                         mix_seed(cfg.seed ^ 0x9e3779b97f4a7c15ULL, static_cast<std::uint64_t>(step)),
                                         step, static_cast<int>(i))};
      if (first) result.first_steps.push_back(rec);
      if (log.is_open() && (first || step % cfg.log_every == 0)) {
        log << rec.step << ',' << rec.stage << ',' << rec.loss.rate << ',' << rec.loss.wmse << ','
            << rec.loss.total << '\n';
        log.flush();
      }
      if (on_step) on_step(rec);
      first = false;
    }
    meta.step = step;
    meta.stage_frames.push_back(stage.frames);
    meta.stage_ends.push_back(stage.end_step);
    meta.train_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string path =
        (std::filesystem::path(cfg.out_dir) / ("stage" + std::to_string(i) + ".ckpt")).string();
    model::save_checkpoint(path, codec, meta);
    result.checkpoints.push_back(path);
  }
  result.meta = meta;
  return result;
}

}  // namespace lrc::train
