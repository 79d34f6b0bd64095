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

// Acceptance suite: one PASS/FAIL line per criterion. Criteria 7, 8, 9
// and 11 need a trained checkpoint; when it is missing it is produced by
// running the toy training schedule first.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lrc/bitstream.hpp"
#include "lrc/checkpoint.hpp"
#include "lrc/codec.hpp"
#include "lrc/entropy.hpp"
#include "lrc/error.hpp"
#include "lrc/evaluate.hpp"
#include "lrc/metrics.hpp"
#include "lrc/model.hpp"
#include "lrc/qmap.hpp"
#include "lrc/train.hpp"
#include "support/bd_oracle.hpp"

namespace fs = std::filesystem;
using namespace lrc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Held-out clips: a generator seed never used by training.
constexpr std::uint64_t kTestSeed = 0x7e57c11b5ull;

std::vector<std::vector<torch::Tensor>> test_clips(int count, int frames, int size, std::uint64_t seed = kTestSeed) {
  train::ClipDatasetSpec spec;
  spec.clip_length = frames;
  spec.crop = size;
  spec.seed = seed;
  std::vector<std::vector<torch::Tensor>> clips;
  for (int c = 0; c < count; ++c) {
    const torch::Tensor clip = train::synth_clip(spec, c);
    std::vector<torch::Tensor> fr;
    for (int t = 0; t < frames; ++t) fr.push_back(clip[t].unsqueeze(0));
    clips.push_back(std::move(fr));
  }
  return clips;
}

// ---------------------------------------------------------------------------

Outcome lambda_exactness() {
  // alpha * exp(beta * m) for alpha = 1e-3, beta = 6, evaluated offline.
  const double levels[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const double expect[] = {0.001, 0.004481689070338065, 0.020085536923187668, 0.09001713130052181,
                           0.4034287934927351};
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const qmap::LambdaMap lm = qmap::lambda_map(qmap::uniform_map(3, 4, static_cast<float>(levels[i])));
    for (double v : lm.values) worst = std::max(worst, std::fabs(v - expect[i]));
    const double t = train::lambda_tensor(torch::full({1, 1, 2, 2}, levels[i], torch::kFloat64)).max().item<double>();
    worst = std::max(worst, std::fabs(t - expect[i]));
  }
  return {worst <= 1e-9, fmt("max |lambda - closed form| = %.3g (tol 1e-9)", worst)};
}

Outcome uniform_reduction() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const int h = 16 + 8 * static_cast<int>(rng() % 5), w = 16 + 8 * static_cast<int>(rng() % 5);
    std::vector<double> a(3 * h * w), b(3 * h * w);
    for (auto& v : a) v = u(rng);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::clamp(a[i] + 0.2 * (u(rng) - 0.5), 0.0, 1.0);
    const double level = u(rng);
    double se = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) se += (a[i] - b[i]) * (a[i] - b[i]);
    const double expect = 0.001 * std::exp(6.0 * level) * se / static_cast<double>(a.size());
    const auto opt = torch::TensorOptions().dtype(torch::kFloat64);
    const torch::Tensor x = torch::from_blob(a.data(), {1, 3, h, w}, opt);
    const torch::Tensor y = torch::from_blob(b.data(), {1, 3, h, w}, opt);
    const torch::Tensor lam = train::lambda_tensor(torch::full({1, 1, h, w}, level, opt));
    const double got = train::wmse_loss(x, y, lam).item<double>();
    worst = std::max(worst, std::fabs(got - expect) / expect);
  }
  return {worst <= 1e-6, fmt("100 pairs, max relative deviation from lambda*MSE = %.3g (tol 1e-6)", worst)};
}

Outcome gradient_fidelity() {
  torch::manual_seed(5);
  model::Codec codec(model::mini_config());
  codec->to(torch::kFloat64);
  const std::int64_t params = codec->parameter_count();
  const auto opt = torch::TensorOptions().dtype(torch::kFloat64);
  const torch::Tensor frames = torch::rand({1, 2, 3, 32, 32}, opt);
  torch::Tensor maps = torch::rand({1, 2, 1, 32, 32}, opt).requires_grad_(true);
  const train::LossConfig lc;
  const std::uint64_t seed = 99;
  auto loss_at = [&](const torch::Tensor& m) {
    return train::sequence_loss(*codec, frames, m, lc, model::QuantMode::kRelaxed, seed).total;
  };

  codec->zero_grad();
  loss_at(maps).backward();

  struct Coord {
    torch::Tensor tensor;  // parameter or map
    torch::Tensor grad;
    std::int64_t index;
  };
  std::vector<Coord> coords;
  std::mt19937_64 rng(3);
  const auto named = codec->named_parameters();
  for (const auto& item : named) {  // one per tensor, then uniform over elements
    auto p = item.value();
    coords.push_back({p, p.grad(), static_cast<std::int64_t>(rng() % p.numel())});
  }
  std::vector<std::pair<torch::Tensor, std::int64_t>> flat;
  while (coords.size() < 150) {
    std::int64_t k = static_cast<std::int64_t>(rng() % params);
    for (const auto& item : named) {
      auto p = item.value();
      if (k < p.numel()) {
        coords.push_back({p, p.grad(), k});
        break;
      }
      k -= p.numel();
    }
  }
  while (coords.size() < 200) coords.push_back({maps, maps.grad(), static_cast<std::int64_t>(rng() % maps.numel())});

  // The loss is O(1e3) while many weight gradients are O(1e-6), so the
  // step is chosen to keep round-off below the truncation error.
  const double step = 1e-3;
  int good = 0, zeros = 0;
  double worst_map = 0.0;
  torch::NoGradGuard ng;
  for (const auto& c : coords) {
    auto flat_t = c.tensor.view({-1});
    const double analytic = c.grad.view({-1})[c.index].item<double>();
    const double orig = flat_t[c.index].item<double>();
    const double h = step * std::max(1.0, std::fabs(orig));
    flat_t[c.index] = orig + h;
    const double up = loss_at(maps).item<double>();
    flat_t[c.index] = orig - h;
    const double down = loss_at(maps).item<double>();
    flat_t[c.index] = orig;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max(std::fabs(analytic), std::fabs(numeric));
    const double rel = scale < 1e-10 ? 0.0 : std::fabs(analytic - numeric) / scale;
    if (scale < 1e-10) ++zeros;
    if (rel < 1e-3) ++good;
    if (c.tensor.is_same(maps)) worst_map = std::max(worst_map, rel);
  }
  const double frac = good / 200.0;
  return {frac >= 0.95 && params <= 50000,
          fmt("%lld-parameter model, %d/200 coordinates within 1e-3 (need 95%%), %d both ~0, worst map rel err %.2g",
              static_cast<long long>(params), good, zeros, worst_map)};
}

Outcome quantizer_contract() {
  torch::manual_seed(17);
  const auto opt = torch::TensorOptions().dtype(torch::kFloat64);
  const std::int64_t n = 100000;
  const torch::Tensor y = torch::randn({n}, opt) * 20;
  const torch::Tensor mu = torch::randn({n}, opt) * 5;
  const torch::Tensor omega = torch::exp(torch::rand({n}, opt) * 10 - 7);  // 1e-3 .. 20
  const auto q = model::scale_quantize(y, omega, mu, model::QuantMode::kCode, {});
  const double excess = ((q.y_hat - y).abs() - omega / 2 * (1 + 1e-12)).max().item<double>();

  const torch::Tensor one = torch::ones({n}, opt);
  const auto r = model::scale_quantize(y, one, mu, model::QuantMode::kCode, {});
  const bool rounding = torch::equal(r.y_hat, torch::round(y - mu) + mu);
  const torch::Tensor two = torch::full({n}, 2.0, opt);
  const auto s = model::scale_quantize(y, two, mu, model::QuantMode::kCode, {});
  const double differs = (s.y_hat != torch::round(y - mu) + mu).to(torch::kFloat64).mean().item<double>();
  return {excess <= 0.0 && rounding && differs > 0.0,
          fmt("1e5 samples: max(|y_hat - y| - omega/2) = %.3g, omega=1 rounding %s, omega=2 differs on %.0f%%", excess,
              rounding ? "exact" : "WRONG", differs * 100)};
}

Outcome lossless_pipeline() {
  torch::manual_seed(23);
  model::Codec codec(model::CodecConfig{});
  codec->eval();
  int frames_checked = 0;
  bool ok = true;
  std::string why;
  for (int seq = 0; seq < 10 && ok; ++seq) {
    const int h = 32 + 16 * (seq % 3), w = 48 + 8 * (seq % 4);
    std::vector<torch::Tensor> frames;
    torch::Tensor base = torch::rand({1, 3, h, w});
    for (int t = 0; t < 5; ++t) frames.push_back((base + 0.1 * torch::randn({1, 3, h, w})).clamp(0, 1));
    std::vector<qmap::QualityMap> maps;
    for (const auto& g : qmap::generate_sequence(h, w, 5, qmap::MapGenConfig{}, 100 + seq)) maps.push_back(g.map);
    const auto enc = codec::encode_sequence(*codec, frames, maps, entropy::CoderBackend::kReference);
    const entropy::Bitstream bs = entropy::unpack_bitstream(enc.bytes);
    if (entropy::pack_bitstream(bs) != enc.bytes) ok = false, why = "pack(unpack) changed bytes";
    for (std::size_t t = 0; t < frames.size(); ++t)
      if (!(bs.frames[t] == enc.frames[t].payload)) ok = false, why = "unpacked payload differs";
    const auto dec = codec::decode_sequence(*codec, enc.bytes, entropy::CoderBackend::kReference);
    for (std::size_t t = 0; t < frames.size(); ++t) {
      ++frames_checked;
      if (!torch::equal(dec.frames[t].output.reconstruction, enc.frames[t].output.reconstruction))
        ok = false, why = "reconstruction differs";
      for (std::size_t l = 0; l < dec.frames[t].output.state.buffers.size(); ++l)
        if (!torch::equal(dec.frames[t].output.state.buffers[l], enc.frames[t].output.state.buffers[l]))
          ok = false, why = "temporal state differs";
    }
  }
  return {ok && frames_checked == 50, fmt("%d frames, pack/unpack identity and bit-exact decode%s%s", frames_checked,
                                          why.empty() ? "" : ": ", why.c_str())};
}

Outcome rate_calibration() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t min_symbols = SIZE_MAX;
  for (int field = 0; field < 20; ++field) {
    const std::size_t n = 10000 + 500 * field;
    entropy::SymbolPlane plane;
    double ideal = 0.0;
    // Log-uniform scales; each field has its own range.
    const double lo = std::log(0.15 + 0.1 * field), hi = lo + std::log(40.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::exp(lo + (hi - lo) * u(rng));
      std::normal_distribution<double> g(0.0, s);
      const auto k = entropy::clamp_to_support(static_cast<std::int32_t>(std::lround(g(rng))), s);
      plane.symbols.push_back(k);
      plane.sigma_tilde.push_back(s);
      ideal += entropy::symbol_bits(k, s);
    }
    const double actual = 8.0 * static_cast<double>(entropy::encode_plane(plane, entropy::CoderBackend::kReference).size());
    worst = std::max(worst, std::fabs(actual - ideal) / ideal);
    min_symbols = std::min(min_symbols, n);
  }
  return {worst <= 0.03, fmt("20 fields of >= %zu symbols, worst |coded - ideal| / ideal = %.3f%% (tol 3%%)",
                             min_symbols, worst * 100)};
}

Outcome bd_rate_oracle() {
  using eval::RdCurve;
  auto make = [](const std::vector<double>& r, const std::vector<double>& p) {
    RdCurve c;
    for (std::size_t i = 0; i < r.size(); ++i) c.points.push_back({r[i], p[i], ""});
    return c;
  };
  const RdCurve ref = make({0.1, 0.2, 0.4, 0.8}, {30, 33, 35.5, 37.5});
  RdCurve shifted = ref;
  for (auto& p : shifted.points) p.bpp *= 1.10;
  const double self = eval::bd_rate(ref, ref), plus = eval::bd_rate(ref, shifted);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto curve = [&](double q0) {
      std::vector<double> r, p;
      double rate = 0.03 + 0.05 * u(rng), q = q0;
      for (int i = 0; i < 4 + trial % 3; ++i) {
        r.push_back(rate);
        p.push_back(q);
        rate *= 1.4 + u(rng);
        q += 1.0 + 3.0 * u(rng);
      }
      return make(r, p);
    };
    const RdCurve a = curve(28.0 + u(rng)), b = curve(28.0 + u(rng));
    worst = std::max(worst, std::fabs(eval::bd_rate(a, b) - lrc::testing::bd_oracle(a, b)));
  }
  const bool pass = std::fabs(self) <= 1e-6 && std::fabs(plus - 10.0) <= 1e-6 && worst <= 0.05;
  return {pass, fmt("bd(c,c) = %.2g, x1.10 shift = %.9f%%, 20 random curve pairs max |ours - oracle| = %.4f pp",
                    self, plus, worst)};
}

// ---------------------------------------------------------------------------
// Trained-model criteria.

struct Trained {
  model::Codec codec{nullptr};
  model::CheckpointMeta meta;
  std::string path;
};

Outcome uniform_sweep(Trained& m, int clips, int frames, int size) {
  const double levels[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto set = test_clips(clips, frames, size);
  const auto curve = eval::sweep_uniform(*m.codec, set, std::vector<double>(std::begin(levels), std::end(levels)));
  bool increasing = true;
  std::ostringstream pts;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    pts << (i ? " " : "") << fmt("(%.3f bpp, %.2f dB)", curve.points[i].bpp, curve.points[i].psnr);
    if (i && (curve.points[i].bpp <= curve.points[i - 1].bpp || curve.points[i].psnr <= curve.points[i - 1].psnr))
      increasing = false;
  }
  const double dpsnr = curve.points.back().psnr - curve.points.front().psnr;
  const double ratio = curve.points.back().bpp / curve.points.front().bpp;
  const std::int64_t params = m.codec->parameter_count();
  const bool budget = params <= 2000000 && m.meta.train_seconds <= 3600.0;
  return {increasing && dpsnr >= 4.0 && ratio >= 3.0 && budget,
          fmt("%d clips; %s; dPSNR %.2f dB (need 4), bpp ratio %.2f (need 3), monotone %s; %lld params, trained %.0f s",
              clips, pts.str().c_str(), dpsnr, ratio, increasing ? "yes" : "no", static_cast<long long>(params),
              m.meta.train_seconds)};
}

Outcome region_map(Trained& m, int clips, int frames, int size) {
  const auto set = test_clips(clips, frames, size, kTestSeed + 1);
  const int side = size / 2;  // 25% of the area
  const qmap::Region region{qmap::ShapeKind::kRectangle, size / 4, size / 4, side, side, 1.0};
  const qmap::QualityMap rect = qmap::compose_region_map(size, size, 0.0, std::span(&region, 1));
  const std::vector<std::uint8_t> mask = qmap::region_mask(size, size, std::span(&region, 1));
  double pin = 0, pout = 0, hin = 0, hout = 0;
  int n = 0;
  for (const auto& clip : set) {
    const auto e = eval::evaluate_clip(*m.codec, clip, std::vector<qmap::QualityMap>(clip.size(), rect), &mask);
    for (const auto& f : e.frames) {
      pin += f.psnr_in;
      pout += f.psnr_out;
      hin += f.heat_in;
      hout += f.heat_out;
      ++n;
    }
  }
  pin /= n, pout /= n, hin /= n, hout /= n;
  return {pin - pout >= 2.0 && hin >= 1.5 * hout,
          fmt("%d clips: PSNR in %.2f / out %.2f dB (gap %.2f, need 2); heat in %.3f / out %.3f bits/px (ratio %.2f, "
              "need 1.5)",
              clips, pin, pout, pin - pout, hin, hout, hin / hout)};
}

Outcome single_model(Trained& m) {
  const auto size_before = fs::file_size(m.path);
  std::ifstream in(m.path, std::ios::binary);
  const std::vector<char> bytes_before((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<torch::Tensor> snapshot;
  for (const auto& p : m.codec->parameters()) snapshot.push_back(p.clone());

  // The stored tensors are exactly the codec's parameters; none is
  // indexed by a rate point.
  const auto fresh = model::load_checkpoint(m.path);
  const auto stored = fresh.codec->named_parameters();
  bool per_rate = false;
  for (const auto& item : stored)
    if (item.key().find("rate") != std::string::npos || item.key().find("level_") != std::string::npos) per_rate = true;
  const bool same_set = stored.size() == m.codec->named_parameters().size();

  const auto levels = eval::default_levels();
  const auto set = test_clips(1, 2, 64, kTestSeed + 2);
  const auto curve = eval::sweep_uniform(*m.codec, set, levels);
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    if (curve.points[i].bpp != curve.points[i - 1].bpp) ++distinct;

  bool unchanged = true;
  const auto now = m.codec->parameters();
  for (std::size_t i = 0; i < snapshot.size(); ++i) unchanged = unchanged && torch::equal(snapshot[i], now[i]);
  std::ifstream again(m.path, std::ios::binary);
  const std::vector<char> bytes_after((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>());
  const bool file_same = fs::file_size(m.path) == size_before && bytes_after == bytes_before;
  return {levels.size() == 21 && curve.points.size() == 21 && !per_rate && same_set && unchanged && file_same,
          fmt("%zu sweep points (%zu distinct rates) from one %zu-byte checkpoint with %zu tensors; "
              "per-rate tensors: %s; file unchanged: %s; weights unchanged: %s",
              curve.points.size(), distinct, static_cast<std::size_t>(size_before), stored.size(),
              per_rate ? "yes" : "none", file_same ? "yes" : "no", unchanged ? "yes" : "no")};
}

Outcome optimized_maps(Trained& m, int clips, int frames, int size, int steps, std::string& note) {
  const auto set = test_clips(clips, frames, size, kTestSeed + 3);
  const double targets[] = {qmap::lambda_of(0.25), qmap::lambda_of(0.5), qmap::lambda_of(0.75)};
  bool ok = true;
  int improved = 0, total = 0;
  double best_gain = 0.0;
  for (double lam : targets)
    for (const auto& clip : set) {
      eval::OptimizeOptions opt;
      opt.steps = steps;
      const auto r = eval::optimize_qmap(*m.codec, clip, lam, opt);
      // Re-measure the returned maps independently of the optimizer.
      const double obj = eval::clip_objective(eval::evaluate_clip(*m.codec, clip, r.maps), lam);
      ++total;
      if (obj > r.best_uniform_objective + 1e-9) ok = false;
      if (obj < r.best_uniform_objective - 1e-9) {
        ++improved;
        best_gain = std::max(best_gain, (r.best_uniform_objective - obj) / r.best_uniform_objective);
      }
    }

  // A flat static clip carries no spatial structure to exploit.
  std::vector<torch::Tensor> flat(frames, torch::full({1, 3, size, size}, 0.45f));
  eval::OptimizeOptions opt;
  opt.steps = steps;
  const auto r = eval::optimize_qmap(*m.codec, flat, qmap::lambda_of(0.5), opt);
  double spread = 0.0;
  for (const auto& mp : r.maps) spread = std::max(spread, static_cast<double>(mp.max() - mp.min()));
  note = fmt("flat static clip: optimized map spread %.3f, objective %.4f vs best uniform %.4f (near-uniform "
             "means spread <= 0.2; reported, not gated)",
             spread, r.objective, r.best_uniform_objective);
  return {ok, fmt("%d (clip, lambda) cases: objective <= best uniform on all: %s; strictly better on %d (max gain %.2f%%)",
                  total, ok ? "yes" : "no", improved, best_gain * 100)};
}

Trained obtain_model(const std::string& checkpoint, const std::string& config) {
  if (!fs::exists(checkpoint)) {
    std::cout << "training checkpoint missing; running " << config << " (this takes a while)" << std::endl;
    train::TrainConfig cfg = train::load_train_config(config);
    cfg.out_dir = fs::path(checkpoint).parent_path().string();
    cfg.log_path = (fs::path(cfg.out_dir) / "train.csv").string();
    torch::manual_seed(cfg.seed);
    model::Codec codec(cfg.model);
    train::run_schedule(*codec, cfg, {}, [](const train::StepRecord& r) {
      if (r.step % 200 == 0)
        std::cout << "  step " << r.step << " stage " << r.stage << " loss " << r.loss.total << std::endl;
    });
    if (!fs::exists(checkpoint)) throw ConfigError("training did not produce " + checkpoint);
  }
  auto loaded = model::load_checkpoint(checkpoint);
  loaded.codec->eval();
  return {loaded.codec, loaded.meta, checkpoint};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string checkpoint = "runs/toy/stage2.ckpt";
  std::string config = "configs/toy.cfg";
  std::vector<int> only;
  int sweep_clips = 16, sweep_frames = 8, size = 128, region_clips = 8, opt_clips = 4, opt_frames = 3, opt_steps = 100;
  app.add_option("--checkpoint", checkpoint, "Trained checkpoint (trained from --config if missing)");
  app.add_option("--config", config, "Training config used when the checkpoint is missing");
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--sweep-frames", sweep_frames);
  app.add_option("--size", size);
  app.add_option("--opt-clips", opt_clips);
  app.add_option("--opt-steps", opt_steps);
  CLI11_PARSE(app, argc, argv);
  torch::set_num_threads(1);

  int failures = 0;
  auto run = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail
              << fmt(" (%.1f s)", secs) << std::endl;
  };

  run(1, "lambda map closed form", lambda_exactness);
  run(2, "uniform weighted MSE reduces to lambda*MSE", uniform_reduction);
  run(3, "gradients match central differences", gradient_fidelity);
  run(4, "quantizer contract", quantizer_contract);
  run(5, "lossless pipeline", lossless_pipeline);
  run(6, "rate estimate calibration", rate_calibration);

  const bool need_model = only.empty() || std::any_of(only.begin(), only.end(), [](int i) {
                            return i == 7 || i == 8 || i == 9 || i == 11;
                          });
  Trained trained;
  if (need_model) {
    try {
      trained = obtain_model(checkpoint, config);
    } catch (const std::exception& e) {
      std::cout << "could not obtain a trained model: " << e.what() << std::endl;
    }
  }
  auto with_model = [&](const std::function<Outcome()>& fn) {
    return [&, fn] { return trained.codec ? fn() : Outcome{false, "no trained model"}; };
  };
  run(7, "uniform sweep on held-out clips", with_model([&] { return uniform_sweep(trained, sweep_clips, sweep_frames, size); }));
  run(8, "centered region map", with_model([&] { return region_map(trained, region_clips, sweep_frames, size); }));
  run(9, "one checkpoint serves every rate", with_model([&] { return single_model(trained); }));
  run(10, "bd-rate against an integration oracle", bd_rate_oracle);
  std::string note;
  run(11, "optimized maps never lose to uniform maps",
      with_model([&] { return optimized_maps(trained, opt_clips, opt_frames, 64, opt_steps, note); }));
  if (!note.empty()) std::cout << "note: " << note << std::endl;

  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criterion(s) failed" : "acceptance: all passed")
            << std::endl;
  return failures ? 1 : 0;
}
