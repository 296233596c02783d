#include "dynabg/frame.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dynabg {

void FrameSequence::validate() const {
  if (frames.empty()) {
    throw std::invalid_argument("frame sequence is empty");
  }
  const int w = frames.front().width;
  const int h = frames.front().height;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    if (f.width <= 0 || f.height <= 0 ||
        f.data.size() != static_cast<std::size_t>(f.width) * f.height) {
      std::ostringstream msg;
      msg << "frame " << i << " is malformed (" << f.width << "x" << f.height
          << ", " << f.data.size() << " pixels)";
      throw std::invalid_argument(msg.str());
    }
    if (f.width != w || f.height != h) {
      std::ostringstream msg;
      msg << "frame " << i << " is " << f.width << "x" << f.height
          << " but frame 0 is " << w << "x" << h;
      throw std::invalid_argument(msg.str());
    }
  }
}

std::uint8_t clamp_to_byte(double v) {
  const double r = std::round(v);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

std::uint8_t to_grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return clamp_to_byte(0.299 * r + 0.587 * g + 0.114 * b);
}

PixelMatrix stack(const FrameSequence& seq) {
  seq.validate();
  const Eigen::Index m = static_cast<Eigen::Index>(seq.width()) * seq.height();
  const Eigen::Index n = static_cast<Eigen::Index>(seq.size());
  PixelMatrix d(m, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Frame& f = seq[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < m; ++j) {
      d(j, k) = static_cast<double>(f.data[static_cast<std::size_t>(j)]);
    }
  }
  return d;
}

FrameSequence unstack(const PixelMatrix& m, int width, int height) {
  if (width <= 0 || height <= 0 ||
      m.rows() != static_cast<Eigen::Index>(width) * height) {
    std::ostringstream msg;
    msg << "matrix has " << m.rows() << " rows, expected " << width << "x"
        << height << " = " << static_cast<long long>(width) * height;
    throw std::invalid_argument(msg.str());
  }
  FrameSequence seq;
  seq.frames.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    Frame f(width, height);
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
      f.data[static_cast<std::size_t>(j)] = clamp_to_byte(m(j, k));
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

}  // namespace dynabg
