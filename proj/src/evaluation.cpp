#include "dynabg/evaluation.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dynabg/image_io.hpp"

namespace dynabg {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  tp += other.tp;
  fn += other.fn;
  fp += other.fp;
  evaluated += other.evaluated;
  return *this;
}

ConfusionCounts compare(const Frame& mask, const Frame& gt, const Frame* roi) {
  if (mask.width != gt.width || mask.height != gt.height) {
    std::ostringstream msg;
    msg << "mask is " << mask.width << "x" << mask.height << " but ground truth is "
        << gt.width << "x" << gt.height;
    throw std::invalid_argument(msg.str());
  }
  if (roi && (roi->width != gt.width || roi->height != gt.height)) {
    throw std::invalid_argument("ROI dimensions do not match ground truth");
  }
  ConfusionCounts counts;
  for (std::size_t i = 0; i < gt.data.size(); ++i) {
    if (roi && roi->data[i] == 0) continue;
    const std::uint8_t label = gt.data[i];
    if (label == 85 || label == 170) continue;  // outside ROI / unknown
    bool truth_fg;
    if (label == 255) {
      truth_fg = true;
    } else if (label == 0 || label == 50) {  // shadow counts as background
      truth_fg = false;
    } else {
      throw std::invalid_argument("unexpected ground-truth label " +
                                  std::to_string(label));
    }
    ++counts.evaluated;
    const bool mask_fg = mask.data[i] > 127;
    if (truth_fg && mask_fg) ++counts.tp;
    else if (truth_fg && !mask_fg) ++counts.fn;
    else if (!truth_fg && mask_fg) ++counts.fp;
  }
  return counts;
}

MetricReport metrics(const ConfusionCounts& counts) {
  if (counts.tp < 0 || counts.fn < 0 || counts.fp < 0) {
    throw std::invalid_argument("negative confusion counts");
  }
  MetricReport report;
  if (counts.tp + counts.fn > 0) {
    report.recall = static_cast<double>(counts.tp) / (counts.tp + counts.fn);
  } else {
    report.degenerate = true;
  }
  if (counts.tp + counts.fp > 0) {
    report.precision = static_cast<double>(counts.tp) / (counts.tp + counts.fp);
  } else {
    report.degenerate = true;
  }
  if (report.recall + report.precision > 0.0) {
    report.f_measure =
        2.0 * report.recall * report.precision / (report.recall + report.precision);
  } else {
    report.degenerate = true;
  }
  return report;
}

namespace {

std::filesystem::path gt_path(const std::filesystem::path& dir, int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "gt%06d.png", index);
  return dir / name;
}

}  // namespace

ConfusionCounts accumulate_counts(const MaskSequence& masks,
                                  const std::filesystem::path& gt_dir,
                                  const Frame* roi, int first_frame, int last_frame) {
  ConfusionCounts totals;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const int frame_no = static_cast<int>(i) + 1;
    if (frame_no < first_frame) continue;
    if (last_frame >= 0 && frame_no > last_frame) continue;
    const auto path = gt_path(gt_dir, frame_no);
    if (!std::filesystem::exists(path)) {
      throw std::runtime_error("missing ground truth: " + path.string());
    }
    Frame gt = load_frame(path);
    try {
      totals += compare(masks[i], gt, roi);
    } catch (const std::exception& err) {
      throw std::runtime_error("frame " + std::to_string(frame_no) + ": " + err.what());
    }
  }
  return totals;
}

MetricReport evaluate_sequence(const MaskSequence& masks,
                               const std::filesystem::path& gt_dir) {
  return metrics(accumulate_counts(masks, gt_dir));
}

BackgroundKind parse_background_kind(const std::string& name) {
  if (name == "static") return BackgroundKind::Static;
  if (name == "wave") return BackgroundKind::Wave;
  if (name == "snow") return BackgroundKind::Snow;
  throw std::invalid_argument("unknown background kind '" + name +
                              "' (expected static, wave or snow)");
}

std::string to_string(BackgroundKind kind) {
  switch (kind) {
    case BackgroundKind::Static: return "static";
    case BackgroundKind::Wave: return "wave";
    case BackgroundKind::Snow: return "snow";
  }
  return "?";
}

void SceneConfig::validate() const {
  if (width < 1 || height < 1) throw std::invalid_argument("scene dimensions must be >= 1");
  if (frame_count < 1) throw std::invalid_argument("frames must be >= 1");
  if (object_size < 1) throw std::invalid_argument("object-size must be >= 1");
  if (kind == BackgroundKind::Wave && !(wave_period > 0.0)) {
    throw std::invalid_argument("wave period must be > 0");
  }
  if (snow_rate < 0.0) throw std::invalid_argument("snow-rate must be >= 0");
  if (noise_sigma < 0.0) throw std::invalid_argument("noise-sigma must be >= 0");
  for (int t = 0; t < frame_count; ++t) {
    const int x = static_cast<int>(std::lround(object_x0 + velocity_x * t));
    const int y = static_cast<int>(std::lround(object_y0 + velocity_y * t));
    if (x < 0 || y < 0 || x + object_size > width || y + object_size > height) {
      std::ostringstream msg;
      msg << "object leaves frame bounds at frame " << t << " (position " << x
          << "," << y << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

SynthScene synth_scene(const SceneConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> flake_x(0, config.width - 1);
  std::uniform_int_distribution<int> flake_y(0, config.height - 1);
  std::normal_distribution<double> noise(0.0, config.noise_sigma);

  SynthScene scene;
  scene.frames.frames.reserve(static_cast<std::size_t>(config.frame_count));
  scene.ground_truth.frames.reserve(static_cast<std::size_t>(config.frame_count));

  const int flakes_per_frame = static_cast<int>(std::lround(config.snow_rate));
  const std::uint8_t flake_level =
      static_cast<std::uint8_t>(std::min(255, config.background_level + 100));

  for (int t = 0; t < config.frame_count; ++t) {
    std::vector<double> canvas(static_cast<std::size_t>(config.width) * config.height,
                               static_cast<double>(config.background_level));

    if (config.kind == BackgroundKind::Wave) {
      // traveling crest: 1 px/frame along x, slightly slanted front
      for (int y = 0; y < config.height; ++y) {
        for (int x = 0; x < config.width; ++x) {
          const double phase =
              2.0 * std::numbers::pi * ((x + 0.35 * y) - t) / config.wave_period;
          canvas[static_cast<std::size_t>(y) * config.width + x] +=
              config.wave_amplitude * std::sin(phase);
        }
      }
    }

    // object square
    const int ox = static_cast<int>(std::lround(config.object_x0 + config.velocity_x * t));
    const int oy = static_cast<int>(std::lround(config.object_y0 + config.velocity_y * t));
    for (int y = oy; y < oy + config.object_size; ++y) {
      for (int x = ox; x < ox + config.object_size; ++x) {
        canvas[static_cast<std::size_t>(y) * config.width + x] = config.object_level;
      }
    }

    if (config.kind == BackgroundKind::Snow) {
      // single-frame flecks, 2x2, drawn over whatever is beneath
      for (int f = 0; f < flakes_per_frame; ++f) {
        const int fx = flake_x(rng);
        const int fy = flake_y(rng);
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const int x = fx + dx, y = fy + dy;
            if (x < config.width && y < config.height) {
              canvas[static_cast<std::size_t>(y) * config.width + x] = flake_level;
            }
          }
        }
      }
    }

    Frame frame(config.width, config.height);
    for (std::size_t i = 0; i < canvas.size(); ++i) {
      double v = canvas[i];
      if (config.noise_sigma > 0.0) v += noise(rng);
      frame.data[i] = clamp_to_byte(v);
    }

    Frame gt(config.width, config.height, 0);
    for (int y = oy; y < oy + config.object_size; ++y) {
      for (int x = ox; x < ox + config.object_size; ++x) {
        gt.at(x, y) = 255;
      }
    }

    scene.frames.frames.push_back(std::move(frame));
    scene.ground_truth.frames.push_back(std::move(gt));
  }
  return scene;
}

}  // namespace dynabg
