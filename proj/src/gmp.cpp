#include "dynabg/gmp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dynabg/parallel.hpp"

namespace dynabg {

void PoolingConfig::validate() const {
  if (window_size < 1 || window_size % 2 == 0) {
    throw std::invalid_argument("window must be odd and >= 1, got " +
                                std::to_string(window_size));
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("sigma must be > 0, got " + std::to_string(sigma));
  }
}

double conditional_prob(double u_prime, double u, double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("sigma must be > 0");
  }
  const double d = u_prime - u;
  return std::exp(-d * d / (2.0 * sigma * sigma)) /
         (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

double window_score(std::span<const std::uint8_t> window, double u, double sigma) {
  double score = 0.0;
  for (std::uint8_t v : window) {
    score += conditional_prob(static_cast<double>(v), u, sigma);
  }
  return score;
}

namespace {

// Gaussian kernel sampled at integer intensity distances 0..255,
// normalization included.
std::array<double, 256> kernel_table(double sigma) {
  std::array<double, 256> k;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int d = 0; d < 256; ++d) {
    k[static_cast<std::size_t>(d)] = norm * std::exp(-static_cast<double>(d) * d * inv);
  }
  return k;
}

// Argmax of the posterior score over {0..255} given a window histogram.
// The score strictly increases as a candidate outside [lo, hi] moves toward
// the window's value range, so the search stays inside it; ties break
// toward the smallest candidate because only strict improvement replaces.
std::uint8_t stable_value_hist(const std::array<int, 256>& hist, int lo, int hi,
                               const std::array<double, 256>& kernel) {
  std::vector<std::pair<int, int>> bins;  // (value, count)
  bins.reserve(32);
  for (int v = lo; v <= hi; ++v) {
    if (hist[static_cast<std::size_t>(v)] > 0) {
      bins.emplace_back(v, hist[static_cast<std::size_t>(v)]);
    }
  }
  int best_u = lo;
  double best_score = -1.0;
  for (int u = lo; u <= hi; ++u) {
    double score = 0.0;
    for (const auto& [v, count] : bins) {
      score += count * kernel[static_cast<std::size_t>(std::abs(v - u))];
    }
    if (score > best_score) {
      best_score = score;
      best_u = u;
    }
  }
  return static_cast<std::uint8_t>(best_u);
}

}  // namespace

std::uint8_t stable_value(std::span<const std::uint8_t> window, double sigma) {
  if (window.empty()) {
    throw std::invalid_argument("empty sampling window");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("sigma must be > 0");
  }
  std::array<int, 256> hist{};
  int lo = 255, hi = 0;
  for (std::uint8_t v : window) {
    ++hist[v];
    lo = std::min<int>(lo, v);
    hi = std::max<int>(hi, v);
  }
  return stable_value_hist(hist, lo, hi, kernel_table(sigma));
}

Frame pool_frame(const Frame& frame, const PoolingConfig& config) {
  config.validate();
  if (frame.width <= 0 || frame.height <= 0) {
    throw std::invalid_argument("empty frame");
  }
  if (config.window_size == 1) {
    return frame;  // the window is the pixel itself
  }
  const int half = config.window_size / 2;
  const auto kernel = kernel_table(config.sigma);
  Frame out(frame.width, frame.height);

  parallel_for(static_cast<std::size_t>(frame.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    std::array<int, 256> hist{};
    for (int x = 0; x < frame.width; ++x) {
      hist.fill(0);
      int lo = 255, hi = 0;
      for (int dy = -half; dy <= half; ++dy) {
        const int yy = std::clamp(y + dy, 0, frame.height - 1);
        for (int dx = -half; dx <= half; ++dx) {
          const int xx = std::clamp(x + dx, 0, frame.width - 1);
          const int v = frame.at(xx, yy);
          ++hist[static_cast<std::size_t>(v)];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      out.at(x, y) = stable_value_hist(hist, lo, hi, kernel);
    }
  });
  return out;
}

FrameSequence pool_sequence(const FrameSequence& seq, const PoolingConfig& config) {
  config.validate();
  seq.validate();
  FrameSequence out;
  out.frames.resize(seq.size());
  parallel_for(seq.size(), [&](std::size_t i) {
    out.frames[i] = pool_frame(seq[i], config);
  });
  return out;
}

}  // namespace dynabg
