#ifndef DYNABG_GMP_HPP
#define DYNABG_GMP_HPP

#include <cstdint>
#include <span>

#include "dynabg/frame.hpp"

namespace dynabg {

struct PoolingConfig {
  int window_size = 5;  // odd, >= 1
  double sigma = 10.0;  // intensity units, > 0

  void validate() const;  // throws std::invalid_argument
};

// Gaussian density of u' given u at scale sigma. The normalizing
// constant cancels in the argmax but is kept so values are a real pdf.
double conditional_prob(double u_prime, double u, double sigma);

// Posterior score of candidate value u against a sampling window:
// the sum of conditional_prob(u', u, sigma) over the window contents.
double window_score(std::span<const std::uint8_t> window, double u, double sigma);

// Stable-value of a window: the u in {0..255} with maximal window_score.
// Ties break toward the smallest u. Throws on empty window or sigma <= 0.
std::uint8_t stable_value(std::span<const std::uint8_t> window, double sigma);

// Replaces each pixel by the stable-value of its square window.
// Borders replicate edge pixels, so every window has window_size^2 samples.
Frame pool_frame(const Frame& frame, const PoolingConfig& config);

FrameSequence pool_sequence(const FrameSequence& seq, const PoolingConfig& config);

}  // namespace dynabg

#endif
