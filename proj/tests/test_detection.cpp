#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dynabg/detection.hpp"
#include "dynabg/evaluation.hpp"
#include "test_support.hpp"

using namespace dynabg;

namespace {

double f_measure_against(const MaskSequence& masks, const MaskSequence& gts) {
  ConfusionCounts totals;
  for (std::size_t k = 0; k < masks.size(); ++k) {
    totals += compare(masks[k], gts[k]);
  }
  return metrics(totals).f_measure;
}

std::size_t foreground_pixels(const MaskSequence& masks) {
  std::size_t count = 0;
  for (const Frame& m : masks.frames) {
    for (std::uint8_t v : m.data) {
      if (v == 255) ++count;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("binarize basics") {
  const MaskSequence all_bg = binarize(Eigen::MatrixXd::Zero(6, 3), 1e-6 * 255, 2, 3);
  REQUIRE(all_bg.size() == 3);
  CHECK(foreground_pixels(all_bg) == 0);

  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(6, 3);
  e(4, 1) = 10.0;  // pixel 4 of frame 1
  const MaskSequence one = binarize(e, 1.0, 2, 3);
  CHECK(foreground_pixels(one) == 1);
  CHECK(one[1].at(0, 2) == 255);  // flat index 4 in a 2-wide frame
  CHECK(one[0].at(0, 2) == 0);

  CHECK_THROWS_AS(binarize(e, 1.0, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(binarize(e, -1.0, 2, 3), std::invalid_argument);
}

TEST_CASE("binarize support matches a group-sparse solve exactly") {
  std::mt19937_64 rng(301);
  const Eigen::MatrixXd a0 = testing_oracles::random_matrix(60, 20, rng) *
                             testing_oracles::random_matrix(1, 20, rng).row(0).asDiagonal();
  const Eigen::MatrixXd low = testing_oracles::random_matrix(60, 2, rng) *
                              testing_oracles::random_matrix(2, 20, rng);
  const GroupPartition partition = testing_oracles::random_partition(60, 20, 12, rng);
  Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(60, 20);
  std::uniform_real_distribution<double> mag(25.0, 75.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t g : {2u, 9u}) {
    for (const auto& entry : partition.groups[g]) {
      e0(entry.pixel, entry.frame) = (coin(rng) < 0.5 ? -1.0 : 1.0) * mag(rng);
    }
  }
  const Decomposition dec = solve_sc_rpca(low + e0, partition, {}, WeightMode::Sqrt);
  REQUIRE(dec.converged);
  const MaskSequence masks = binarize(dec.E, 1e-6 * 255.0, 6, 10);
  for (const auto& entry : partition.groups[2]) {
    CHECK(masks[static_cast<std::size_t>(entry.frame)]
              .data[static_cast<std::size_t>(entry.pixel)] == 255);
  }
  for (std::size_t g = 0; g < partition.groups.size(); ++g) {
    if (g == 2 || g == 9) continue;
    for (const auto& entry : partition.groups[g]) {
      CHECK(masks[static_cast<std::size_t>(entry.frame)]
                .data[static_cast<std::size_t>(entry.pixel)] == 0);
    }
  }
}

TEST_CASE("pipeline mode parsing") {
  CHECK(parse_pipeline_mode("rpca-pixel") == PipelineMode::RpcaPixel);
  CHECK(parse_pipeline_mode("rpca-stable") == PipelineMode::RpcaStable);
  CHECK(parse_pipeline_mode("sc-rpca-stable") == PipelineMode::ScRpcaStable);
  CHECK_THROWS_AS(parse_pipeline_mode("magic"), std::invalid_argument);
  CHECK(to_string(PipelineMode::RpcaStable) == "rpca-stable");
}

TEST_CASE("static scene with no visible object yields all-background masks") {
  SceneConfig scene;
  scene.width = 32;
  scene.height = 32;
  scene.frame_count = 8;
  scene.object_size = 8;
  scene.object_x0 = 2.0;
  scene.object_y0 = 12.0;
  scene.velocity_x = 1.0;
  scene.object_level = scene.background_level;  // invisible square
  scene.noise_sigma = 0.0;
  const SynthScene synth = synth_scene(scene);

  DetectionConfig config;
  config.segmentation.target_superpixels = 60;
  for (PipelineMode mode :
       {PipelineMode::RpcaPixel, PipelineMode::RpcaStable, PipelineMode::ScRpcaStable}) {
    config.mode = mode;
    const DetectionResult result = detect(synth.frames, config);
    CHECK(result.decomposition.converged);
    CHECK(foreground_pixels(result.masks) == 0);
  }
}

TEST_CASE("moving square over a static background is recovered") {
  SceneConfig scene;
  scene.width = 48;
  scene.height = 48;
  scene.frame_count = 10;
  scene.object_size = 14;
  scene.object_x0 = 2.0;
  scene.object_y0 = 17.0;
  scene.velocity_x = 3.0;
  scene.noise_sigma = 0.0;
  const SynthScene synth = synth_scene(scene);

  DetectionConfig config;
  config.segmentation.target_superpixels = 120;
  config.mode = PipelineMode::ScRpcaStable;
  const DetectionResult result = detect(synth.frames, config);
  REQUIRE(result.decomposition.converged);
  CHECK(f_measure_against(result.masks, synth.ground_truth) >= 0.95);

  // intermediate artifacts are returned for inspection
  CHECK(result.partition.rows == 48 * 48);
  CHECK(result.partition.cols == 10);
  CHECK(result.features.size() == 10);
  CHECK(result.masks.width() == 48);
  CHECK(result.masks.height() == 48);
}

TEST_CASE("mask support equals the sparse term's support at epsilon") {
  SceneConfig scene;
  scene.width = 24;
  scene.height = 24;
  scene.frame_count = 6;
  scene.object_size = 6;
  scene.object_x0 = 2.0;
  scene.object_y0 = 9.0;
  scene.velocity_x = 2.0;
  const SynthScene synth = synth_scene(scene);
  DetectionConfig config;
  config.segmentation.target_superpixels = 40;
  const DetectionResult result = detect(synth.frames, config);
  for (Eigen::Index k = 0; k < result.decomposition.E.cols(); ++k) {
    for (Eigen::Index j = 0; j < result.decomposition.E.rows(); ++j) {
      const bool in_mask = result.masks[static_cast<std::size_t>(k)]
                               .data[static_cast<std::size_t>(j)] == 255;
      CHECK(in_mask == (std::abs(result.decomposition.E(j, k)) > config.binarize_epsilon));
    }
  }
}

TEST_CASE("detect is deterministic") {
  SceneConfig scene;
  scene.width = 24;
  scene.height = 24;
  scene.frame_count = 6;
  scene.object_size = 6;
  scene.object_x0 = 2.0;
  scene.object_y0 = 9.0;
  scene.velocity_x = 2.0;
  scene.kind = BackgroundKind::Wave;
  scene.wave_amplitude = 15.0;
  scene.noise_sigma = 3.0;
  scene.seed = 5;
  const SynthScene synth = synth_scene(scene);
  DetectionConfig config;
  config.segmentation.target_superpixels = 40;
  const DetectionResult a = detect(synth.frames, config);
  const DetectionResult b = detect(synth.frames, config);
  REQUIRE(a.masks.size() == b.masks.size());
  for (std::size_t k = 0; k < a.masks.size(); ++k) {
    CHECK(a.masks[k] == b.masks[k]);
  }
}

TEST_CASE("modes skip the stages they should") {
  SceneConfig scene;
  scene.width = 20;
  scene.height = 20;
  scene.frame_count = 5;
  scene.object_size = 5;
  scene.object_x0 = 2.0;
  scene.object_y0 = 7.0;
  scene.velocity_x = 2.0;
  const SynthScene synth = synth_scene(scene);
  DetectionConfig config;
  config.segmentation.target_superpixels = 30;

  config.mode = PipelineMode::RpcaPixel;
  const DetectionResult pixel = detect(synth.frames, config);
  CHECK(pixel.partition.rows == 0);  // no partition in rpca modes
  for (std::size_t k = 0; k < synth.frames.size(); ++k) {
    CHECK(pixel.features[k] == synth.frames[k]);  // unpooled input
  }

  config.mode = PipelineMode::RpcaStable;
  const DetectionResult stable = detect(synth.frames, config);
  CHECK(stable.partition.rows == 0);
  CHECK(stable.features[0] == pool_frame(synth.frames[0], config.pooling));
}

TEST_CASE("stage failures carry the stage name") {
  SceneConfig scene;
  scene.width = 10;
  scene.height = 10;
  scene.frame_count = 4;
  scene.object_size = 3;
  scene.object_x0 = 1.0;
  scene.object_y0 = 4.0;
  scene.velocity_x = 1.0;
  const SynthScene synth = synth_scene(scene);
  DetectionConfig config;  // default 200 superpixels exceed a 10x10 frame
  CHECK_THROWS_WITH_AS(detect(synth.frames, config), doctest::Contains("segmentation:"),
                       std::runtime_error);

  FrameSequence one;
  one.frames.push_back(Frame(4, 4, 0));
  CHECK_THROWS_AS(detect(one, config), std::invalid_argument);
}

TEST_CASE("detect validates its config up front") {
  FrameSequence seq;
  seq.frames.assign(2, Frame(8, 8, 0));
  DetectionConfig config;
  config.pooling.window_size = 4;
  CHECK_THROWS_WITH_AS(detect(seq, config), doctest::Contains("window must be odd"),
                       std::invalid_argument);
}
