#ifndef DYNABG_FRAME_HPP
#define DYNABG_FRAME_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace dynabg {

// 8-bit grayscale raster, row-major.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t pixel_count() const { return data.size(); }

  bool operator==(const Frame&) const = default;
};

// Ordered frames sharing one raster geometry.
struct FrameSequence {
  std::vector<Frame> frames;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }
  const Frame& operator[](std::size_t i) const { return frames[i]; }
  Frame& operator[](std::size_t i) { return frames[i]; }

  // Throws std::invalid_argument on empty sequence or mixed dimensions.
  void validate() const;
};

// One frame per column, pixels flattened row-major down each column.
using PixelMatrix = Eigen::MatrixXd;

// BT.601 luma, rounded and clamped to [0,255].
std::uint8_t to_grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b);

std::uint8_t clamp_to_byte(double v);

PixelMatrix stack(const FrameSequence& seq);
FrameSequence unstack(const PixelMatrix& m, int width, int height);

}  // namespace dynabg

#endif
