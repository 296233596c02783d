#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <numeric>
#include <random>
#include <vector>

#include "dynabg/evaluation.hpp"
#include "dynabg/image_io.hpp"

using namespace dynabg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dynabg_eval_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// 4x4 case counted by hand: ground truth has 10 foreground pixels, the
// mask hits 8 of them plus 2 background pixels.
Frame hand_gt() {
  Frame gt(4, 4, 0);
  for (int i = 0; i < 10; ++i) gt.data[static_cast<std::size_t>(i)] = 255;
  return gt;
}

Frame hand_mask() {
  Frame mask(4, 4, 0);
  for (int i = 0; i < 8; ++i) mask.data[static_cast<std::size_t>(i)] = 255;  // 8 hits
  mask.data[14] = 255;  // two false alarms on background
  mask.data[15] = 255;
  return mask;
}

}  // namespace

TEST_CASE("compare on perfect and empty masks") {
  const Frame gt = hand_gt();
  const ConfusionCounts perfect = compare(gt, gt);
  CHECK(perfect.tp == 10);
  CHECK(perfect.fn == 0);
  CHECK(perfect.fp == 0);
  CHECK(perfect.evaluated == 16);

  const ConfusionCounts none = compare(Frame(4, 4, 0), gt);
  CHECK(none.tp == 0);
  CHECK(none.fn == 10);
  CHECK(none.fp == 0);
}

TEST_CASE("compare on the hand-built case") {
  const ConfusionCounts c = compare(hand_mask(), hand_gt());
  CHECK(c.tp == 8);
  CHECK(c.fn == 2);
  CHECK(c.fp == 2);
  CHECK(c.tn() == 4);
  CHECK(c.tp + c.fn + c.fp + c.tn() == c.evaluated);
}

TEST_CASE("compare honors the label convention") {
  Frame gt(4, 1);
  gt.data = {0, 50, 85, 170};  // background, shadow, outside-roi, unknown
  Frame mask(4, 1, 255);
  const ConfusionCounts c = compare(mask, gt);
  CHECK(c.evaluated == 2);  // 85 and 170 excluded
  CHECK(c.fp == 2);         // 0 and 50 both count as background

  Frame bad(4, 1);
  bad.data = {0, 99, 0, 0};
  CHECK_THROWS_WITH_AS(compare(mask, bad), doctest::Contains("label 99"),
                       std::invalid_argument);
  CHECK_THROWS_AS(compare(Frame(3, 1), gt), std::invalid_argument);
}

TEST_CASE("compare excludes pixels outside a spatial ROI") {
  const Frame gt = hand_gt();
  Frame roi(4, 4, 255);
  roi.data[0] = 0;  // drop one foreground pixel from evaluation
  const ConfusionCounts c = compare(hand_mask(), gt, &roi);
  CHECK(c.evaluated == 15);
  CHECK(c.tp == 7);
}

TEST_CASE("metrics formulas and degenerate flags") {
  const MetricReport r = metrics({.tp = 8, .fn = 2, .fp = 2, .evaluated = 16});
  CHECK(r.recall == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.precision == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.f_measure == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(!r.degenerate);

  const MetricReport zero = metrics({.tp = 0, .fn = 0, .fp = 0, .evaluated = 5});
  CHECK(zero.degenerate);
  CHECK(zero.recall == 0.0);
  CHECK(zero.precision == 0.0);
  CHECK(zero.f_measure == 0.0);
}

TEST_CASE("harmonic mean of consistent reference triples") {
  // published (recall, precision, f) rows whose own identity holds
  struct Row {
    double recall, precision, f, tolerance;
  };
  const std::vector<Row> rows = {
      {0.957, 0.787, 0.8635, 5e-4},  // reported as 0.863
      {0.955, 0.930, 0.9423, 5e-4},
      {0.933, 0.979, 0.955, 1e-3},
      {0.995, 0.947, 0.970, 1e-3},
  };
  for (const Row& row : rows) {
    const double f = 2.0 * row.recall * row.precision / (row.recall + row.precision);
    CHECK(std::abs(f - row.f) <= row.tolerance);
  }
}

TEST_CASE("metrics are scale free and harmonically bounded") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::int64_t> count(0, 500);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionCounts c{.tp = count(rng), .fn = count(rng), .fp = count(rng)};
    c.evaluated = c.tp + c.fn + c.fp + count(rng);
    const MetricReport r = metrics(c);
    const MetricReport scaled = metrics(
        {.tp = 7 * c.tp, .fn = 7 * c.fn, .fp = 7 * c.fp, .evaluated = 7 * c.evaluated});
    CHECK(r.recall == doctest::Approx(scaled.recall).epsilon(1e-12));
    CHECK(r.precision == doctest::Approx(scaled.precision).epsilon(1e-12));
    CHECK(r.f_measure == doctest::Approx(scaled.f_measure).epsilon(1e-12));
    if (!r.degenerate) {
      CHECK(r.f_measure >= std::min(r.recall, r.precision) - 1e-12);
      CHECK(r.f_measure <= std::max(r.recall, r.precision) + 1e-12);
    }
  }
}

TEST_CASE("evaluate_sequence accumulates counts before dividing") {
  TempDir tmp;
  MaskSequence masks;
  for (int i = 1; i <= 2; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "gt%06d.png", i);
    save_frame(hand_gt(), tmp.path / name);
    masks.frames.push_back(hand_mask());
  }
  const ConfusionCounts totals = accumulate_counts(masks, tmp.path);
  CHECK(totals.tp == 16);
  CHECK(totals.fn == 4);
  CHECK(totals.fp == 4);
  const MetricReport r = evaluate_sequence(masks, tmp.path);
  CHECK(r.f_measure == doctest::Approx(0.8).epsilon(1e-12));

  MaskSequence perfect;
  perfect.frames.assign(2, hand_gt());
  CHECK(evaluate_sequence(perfect, tmp.path).f_measure == doctest::Approx(1.0));
}

TEST_CASE("evaluate_sequence names the offending frame") {
  TempDir tmp;
  save_frame(hand_gt(), tmp.path / "gt000001.png");
  MaskSequence masks;
  masks.frames.assign(2, hand_mask());
  CHECK_THROWS_WITH_AS(evaluate_sequence(masks, tmp.path),
                       doctest::Contains("gt000002.png"), std::runtime_error);

  save_frame(Frame(3, 3, 0), tmp.path / "gt000002.png");
  CHECK_THROWS_WITH_AS(evaluate_sequence(masks, tmp.path), doctest::Contains("frame 2"),
                       std::runtime_error);
}

TEST_CASE("accumulate_counts honors a temporal range") {
  TempDir tmp;
  for (int i = 1; i <= 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "gt%06d.png", i);
    save_frame(hand_gt(), tmp.path / name);
  }
  MaskSequence masks;
  masks.frames.assign(3, hand_mask());
  const ConfusionCounts mid = accumulate_counts(masks, tmp.path, nullptr, 2, 2);
  CHECK(mid.tp == 8);
  CHECK(mid.evaluated == 16);
}

TEST_CASE("synthetic static scene differs only on the object support") {
  SceneConfig config;
  config.kind = BackgroundKind::Static;
  config.noise_sigma = 0.0;
  config.frame_count = 8;
  const SynthScene scene = synth_scene(config);
  REQUIRE(scene.frames.size() == 8);
  REQUIRE(scene.ground_truth.size() == 8);
  for (std::size_t k = 0; k < scene.frames.size(); ++k) {
    const Frame& f = scene.frames[k];
    const Frame& gt = scene.ground_truth[k];
    for (std::size_t i = 0; i < f.data.size(); ++i) {
      if (gt.data[i] == 255) {
        CHECK(f.data[i] == config.object_level);
      } else {
        CHECK(f.data[i] == config.background_level);
      }
    }
  }
}

TEST_CASE("synth_scene is deterministic per seed") {
  SceneConfig config;
  config.kind = BackgroundKind::Snow;
  config.noise_sigma = 4.0;
  config.seed = 99;
  const SynthScene a = synth_scene(config);
  const SynthScene b = synth_scene(config);
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    CHECK(a.frames[k] == b.frames[k]);
    CHECK(a.ground_truth[k] == b.ground_truth[k]);
  }
  config.seed = 100;
  const SynthScene c = synth_scene(config);
  bool any_difference = false;
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    if (!(a.frames[k] == c.frames[k])) any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("wave background has the configured temporal period") {
  SceneConfig config;
  config.kind = BackgroundKind::Wave;
  config.wave_amplitude = 30.0;
  config.wave_period = 16.0;
  config.noise_sigma = 0.0;
  config.frame_count = 48;
  config.velocity_x = 0.5;
  const SynthScene scene = synth_scene(config);

  // background pixel far from the object's path
  const int px = 60, py = 60;
  std::vector<double> series;
  for (const Frame& f : scene.frames.frames) {
    series.push_back(f.at(px, py));
  }
  const double mean =
      std::accumulate(series.begin(), series.end(), 0.0) / series.size();
  auto autocorr = [&](int lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < series.size(); ++t) {
      s += (series[t] - mean) * (series[t + static_cast<std::size_t>(lag)] - mean);
    }
    return s / static_cast<double>(series.size() - static_cast<std::size_t>(lag));
  };
  int best_lag = 2;
  for (int lag = 2; lag <= 24; ++lag) {
    if (autocorr(lag) > autocorr(best_lag)) best_lag = lag;
  }
  CHECK(best_lag == 16);
}

TEST_CASE("scene validation rejects runaway objects") {
  SceneConfig config;
  config.velocity_x = 10.0;  // leaves a 64-px frame long before frame 30
  CHECK_THROWS_WITH_AS(synth_scene(config), doctest::Contains("leaves frame bounds"),
                       std::invalid_argument);
}
