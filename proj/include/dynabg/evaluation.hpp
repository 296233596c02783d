#ifndef DYNABG_EVALUATION_HPP
#define DYNABG_EVALUATION_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dynabg/detection.hpp"
#include "dynabg/frame.hpp"

namespace dynabg {

// Ground-truth label convention (change-detection benchmark layout):
// 0 background, 50 shadow (counted as background), 85 outside region of
// interest, 170 unknown; 85 and 170 are excluded from all counts.
struct ConfusionCounts {
  std::int64_t tp = 0;         // true foreground classified foreground
  std::int64_t fn = 0;         // true foreground classified background
  std::int64_t fp = 0;         // background classified foreground
  std::int64_t evaluated = 0;  // pixels inside the region of interest

  std::int64_t tn() const { return evaluated - tp - fn - fp; }

  ConfusionCounts& operator+=(const ConfusionCounts& other);
};

struct MetricReport {
  double recall = 0.0;
  double precision = 0.0;
  double f_measure = 0.0;
  bool degenerate = false;  // some ratio was 0/0 and reported as 0
};

ConfusionCounts compare(const Frame& mask, const Frame& gt, const Frame* roi = nullptr);

// recall = tp/(tp+fn), precision = tp/(tp+fp),
// F = 2*recall*precision/(recall+precision); 0/0 yields 0 with the flag set.
MetricReport metrics(const ConfusionCounts& counts);

// Accumulates counts over all frames against gt%06d.png files (1-based),
// then computes metrics once on the totals.
MetricReport evaluate_sequence(const MaskSequence& masks,
                               const std::filesystem::path& gt_dir);
ConfusionCounts accumulate_counts(const MaskSequence& masks,
                                  const std::filesystem::path& gt_dir,
                                  const Frame* roi = nullptr,
                                  int first_frame = 1, int last_frame = -1);

enum class BackgroundKind { Static, Wave, Snow };

BackgroundKind parse_background_kind(const std::string& name);
std::string to_string(BackgroundKind kind);

// Deterministic synthetic scene: a uniform square moving over the chosen
// background. Wave adds a traveling sinusoid (1 px/frame along x, so a
// background pixel's time series has period wave_period frames); snow adds
// single-frame bright flecks; noise_sigma adds Gaussian pixel noise.
struct SceneConfig {
  int width = 64;
  int height = 64;
  int frame_count = 30;
  int object_size = 16;
  double object_x0 = 4.0;
  double object_y0 = 24.0;
  double velocity_x = 1.5;  // px/frame
  double velocity_y = 0.0;
  std::uint8_t object_level = 230;
  std::uint8_t background_level = 120;
  BackgroundKind kind = BackgroundKind::Static;
  double wave_amplitude = 25.0;
  double wave_period = 16.0;  // px
  double snow_rate = 8.0;     // flecks per frame
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthScene {
  FrameSequence frames;
  MaskSequence ground_truth;
};

SynthScene synth_scene(const SceneConfig& config);

}  // namespace dynabg

#endif
