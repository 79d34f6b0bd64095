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

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lrc/codec.hpp"
#include "lrc/error.hpp"
#include "lrc/image_io.hpp"
#include "lrc/seed.hpp"
#include "lrc/train.hpp"

using namespace lrc;
using namespace lrc::train;

namespace {

TrainConfig tiny_config(const std::string& out) {
  TrainConfig cfg;
  cfg.model = model::mini_config();
  cfg.batch = 1;
  cfg.crop = 32;
  cfg.lr = 1e-3;
  cfg.out_dir = out;
  cfg.stages = {{2, 1, "synthetic"}, {4, 2, "synthetic"}};
  return cfg;
}

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_CASE("weighted mse examples") {
  const auto x = torch::rand({1, 3, 8, 8}, torch::kFloat64);
  const auto lam = torch::rand({1, 1, 8, 8}, torch::kFloat64);
  CHECK(wmse_loss(x, x, lam).item<double>() == 0.0);

  const auto y = torch::rand({1, 3, 8, 8}, torch::kFloat64);
  const auto c = torch::full({1, 1, 8, 8}, 0.37, torch::kFloat64);
  CHECK(wmse_loss(x, y, c).item<double>() ==
        doctest::Approx(0.37 * (x - y).square().mean().item<double>()).epsilon(1e-12));

  const auto d = torch::tensor({1.0, 0.0, 0.0, 2.0}, torch::kFloat64).view({1, 1, 2, 2});
  const auto l = torch::tensor({1.0, 2.0, 3.0, 4.0}, torch::kFloat64).view({1, 1, 2, 2});
  CHECK(wmse_loss(d, torch::zeros_like(d), l).item<double>() == doctest::Approx(4.25));

  CHECK_THROWS_AS(wmse_loss(x, y.narrow(3, 0, 4), c), InvalidInput);
  CHECK_THROWS_AS(wmse_loss(x, y, c.narrow(2, 0, 4)), InvalidInput);
}

TEST_CASE("total loss") {
  CHECK(total_loss(0, 0).total == 0.0);
  CHECK(total_loss(0.5, 1.25).total == 1.75);
}

TEST_CASE("raising one pixel of m raises the weighted term") {
  const auto x = torch::rand({1, 3, 6, 6}, torch::kFloat64);
  const auto y = torch::rand({1, 3, 6, 6}, torch::kFloat64);
  auto m = torch::full({1, 1, 6, 6}, 0.4, torch::kFloat64);
  const double before = wmse_loss(x, y, lambda_tensor(m)).item<double>();
  m[0][0][2][3] = 0.45;
  CHECK(wmse_loss(x, y, lambda_tensor(m)).item<double>() > before);
}

TEST_CASE("beta only moves the distortion term on frozen symbols") {
  torch::NoGradGuard ng;
  model::Codec codec(model::mini_config());
  torch::manual_seed(2);
  const auto frames = torch::rand({1, 2, 3, 32, 32});
  const auto maps = torch::rand({1, 2, 1, 32, 32});
  LossConfig a, b;
  b.beta = 4.0;
  const auto la = sequence_loss(*codec, frames, maps, a, model::QuantMode::kCode, 0);
  const auto lb = sequence_loss(*codec, frames, maps, b, model::QuantMode::kCode, 0);
  CHECK(la.breakdown.rate == lb.breakdown.rate);
  CHECK(la.breakdown.wmse > lb.breakdown.wmse);
}

TEST_CASE("synthetic clips") {
  ClipDatasetSpec spec;
  spec.clip_length = 4;
  spec.crop = 32;
  const auto a = synth_clip(spec, 3);
  CHECK(a.sizes() == torch::IntArrayRef({4, 3, 32, 32}));
  CHECK(torch::equal(a, synth_clip(spec, 3)));
  CHECK_FALSE(torch::equal(a, synth_clip(spec, 4)));
  CHECK(a.min().item<float>() >= 0.0f);
  CHECK(a.max().item<float>() <= 1.0f);
  CHECK((a[1] - a[0]).abs().mean().item<double>() > 0.0);
  spec.max_velocity = 0.0;
  const auto still = synth_clip(spec, 3);
  for (int t = 1; t < 4; ++t) CHECK(torch::equal(still[t], still[0]));
  spec.crop = 40;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("training steps") {
  TrainConfig cfg = tiny_config(temp_dir("lrc_train_steps"));
  model::Codec codec(cfg.model);
  BatchSource src(cfg);
  const Batch batch = src.make(cfg.stages[0], 0);
  CHECK(batch.frames.sizes() == torch::IntArrayRef({1, 1, 3, 32, 32}));
  CHECK(torch::equal(batch.frames, src.make(cfg.stages[0], 0).frames));

  SUBCASE("first step is finite and moves the weights") {
    torch::optim::Adam opt(codec->parameters(), torch::optim::AdamOptions(1e-3));
    const auto before = codec->parameters()[0].clone();
    const LossBreakdown l = training_step(*codec, opt, batch, cfg, 1);
    CHECK(std::isfinite(l.total));
    CHECK(l.total == doctest::Approx(l.rate + l.wmse));
    CHECK_FALSE(torch::equal(before, codec->parameters()[0]));
  }
  SUBCASE("zero learning rate leaves the weights alone") {
    torch::optim::Adam opt(codec->parameters(), torch::optim::AdamOptions(0.0));
    std::vector<torch::Tensor> before;
    for (const auto& p : codec->parameters()) before.push_back(p.clone());
    training_step(*codec, opt, batch, cfg, 1);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(torch::equal(before[i], codec->parameters()[i]));
  }
  SUBCASE("uniform single frame equals a plain lambda * mse + bpp step") {
    model::Codec twin(cfg.model);
    {
      torch::NoGradGuard ng;
      for (std::size_t i = 0; i < twin->parameters().size(); ++i) twin->parameters()[i].copy_(codec->parameters()[i]);
    }
    Batch uni = batch;
    uni.maps = torch::full_like(batch.maps, 0.6);
    torch::optim::SGD opt_a(codec->parameters(), torch::optim::SGDOptions(1e-4));
    const LossBreakdown got = training_step(*codec, opt_a, uni, cfg, 11);

    // Hand-built step: the same relaxation noise, unweighted MSE times lambda.
    torch::optim::SGD opt_b(twin->parameters(), torch::optim::SGDOptions(1e-4));
    const auto x = uni.frames.select(1, 0), m = uni.maps.select(1, 0);
    const auto out = twin->encode_frame(x, m, model::simulate_signaled_map(m), twin->init_state(1, 32, 32),
                                        model::QuantMode::kTrain, mix_seed(11, 0));
    const double lambda = qmap::lambda_of(0.6);
    const auto loss = out.total_bits() / (32.0 * 32.0) + lambda * ((x - out.reconstruction) * 255.0).square().mean();
    CHECK(got.total == doctest::Approx(loss.item<double>()).epsilon(1e-6));
    opt_b.zero_grad();
    loss.backward();
    torch::nn::utils::clip_grad_norm_(twin->parameters(), cfg.grad_clip);
    opt_b.step();
    for (std::size_t i = 0; i < twin->parameters().size(); ++i)
      CHECK(torch::allclose(twin->parameters()[i], codec->parameters()[i], 1e-5, 1e-7));
  }
  SUBCASE("non-finite loss aborts without updating") {
    {
      torch::NoGradGuard ng;
      codec->named_parameters()["synthesis.0.bias"].fill_(std::numeric_limits<float>::quiet_NaN());
    }
    torch::optim::Adam opt(codec->parameters(), torch::optim::AdamOptions(1e-3));
    const auto before = codec->parameters()[0].clone();
    CHECK_THROWS_AS(training_step(*codec, opt, batch, cfg, 1, 17, 2), TrainingAbort);
    CHECK(torch::equal(before, codec->parameters()[0]));
  }
}

TEST_CASE("schedule: zero-length stage, stage records, resume") {
  const std::string dir = temp_dir("lrc_schedule");
  SUBCASE("one empty stage saves the initial weights") {
    TrainConfig cfg = tiny_config(dir);
    cfg.stages = {{0, 3, "synthetic"}};
    model::Codec codec(cfg.model);
    const auto before = model::serialize_checkpoint(*codec, {0, {3}, {0}, 0.0, cfg.seed, ""});
    const auto r = run_schedule(*codec, cfg);
    REQUIRE(r.checkpoints.size() == 1);
    const auto loaded = model::load_checkpoint(r.checkpoints[0]);
    CHECK(loaded.meta.step == 0);
    const auto a = codec->named_parameters();
    for (const auto& item : loaded.codec->named_parameters()) CHECK(torch::equal(item.value(), *a.find(item.key())));
    (void)before;
  }
  SUBCASE("resuming reproduces the next stage's first loss") {
    TrainConfig cfg = tiny_config(dir);
    cfg.log_path = dir + "/log.csv";
    torch::manual_seed(1);
    model::Codec codec(cfg.model);
    const auto full = run_schedule(*codec, cfg);
    REQUIRE(full.checkpoints.size() == 2);
    CHECK(full.meta.stage_frames == std::vector<int>{1, 2});
    CHECK(full.meta.step == 4);

    auto resumed = model::load_checkpoint(full.checkpoints[0]);
    CHECK(resumed.meta.step == 2);
    TrainConfig again = cfg;
    again.out_dir = dir + "/resume";
    again.log_path.clear();
    const auto part = run_schedule(*resumed.codec, again, resumed.meta);
    REQUIRE(part.first_steps.size() == 1);
    CHECK(part.first_steps[0].step == 2);
    CHECK(part.first_steps[0].loss.total == full.first_steps[1].loss.total);

    std::ifstream log(cfg.log_path);
    std::string header;
    std::getline(log, header);
    CHECK(header == "step,stage,bpp,wmse,total");
  }
}

TEST_CASE("config parsing") {
  const TrainConfig cfg = parse_train_config(
      "# comment\nstages = 10x3, 20x7@synthetic\nlr = 2e-4\nbatch = 2\ncrop = 32\nseed = 5\n"
      "channels = 8,16,24\nlatent_channels = 4,6,8\nmap_mix = 0.5,0.5,0\n");
  CHECK(cfg.stages.size() == 2);
  CHECK(cfg.stages[1].end_step == 20);
  CHECK(cfg.stages[1].frames == 7);
  CHECK(cfg.lr == 2e-4);
  CHECK(cfg.model.channels == std::vector<int>{8, 16, 24});
  CHECK(cfg.maps.mix_constant == 0.0);
  CHECK_THROWS_AS(parse_train_config("stages = 10x3\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("stages = 10x7, 20x3\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("stages = 10x3, 10x3\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("stages = 10\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("stages = 10x3\ncrop = 48\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("stages = 10x3\nlr = fast\n"), ConfigError);
}

TEST_CASE("frame-directory datasets") {
  const std::string root = temp_dir("lrc_frames");
  ClipDatasetSpec spec;
  spec.clip_length = 3;
  spec.crop = 32;
  for (int c = 0; c < 2; ++c) {
    const auto clip = synth_clip(spec, c);
    const auto dir = std::filesystem::path(root) / ("clip" + std::to_string(c));
    std::filesystem::create_directories(dir);
    for (int t = 0; t < 3; ++t)
      io::write_image((dir / ("f" + std::to_string(t) + ".png")).string(), codec::to_image(clip[t]));
  }
  FrameDirectoryDataset ds(root, 3, 32);
  CHECK(ds.size() == 2);
  const auto s = ds.sample(3, 1);
  CHECK(s.sizes() == torch::IntArrayRef({3, 3, 32, 32}));
  CHECK(torch::equal(s, ds.sample(3, 1)));
  CHECK_THROWS_AS(FrameDirectoryDataset(root, 4, 32), ConfigError);
  CHECK_THROWS_AS(FrameDirectoryDataset(root + "/missing", 1, 32), ConfigError);

  TrainConfig cfg = tiny_config(temp_dir("lrc_frames_out"));
  cfg.stages = {{1, 5, root}};
  model::Codec codec(cfg.model);
  CHECK_THROWS_AS(run_schedule(*codec, cfg), ConfigError);
  cfg.stages = {{1, 2, root}};
  CHECK(run_schedule(*codec, cfg).checkpoints.size() == 1);
}
