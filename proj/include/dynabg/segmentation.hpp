#ifndef DYNABG_SEGMENTATION_HPP
#define DYNABG_SEGMENTATION_HPP

#include <vector>

#include "dynabg/frame.hpp"
#include "dynabg/partition.hpp"

namespace dynabg {

// Small 4-connected pixel cluster from oversegmentation of one frame.
struct Superpixel {
  std::vector<int> pixels;  // flat row-major indices
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double mean_intensity = 0.0;
};

// Merged cluster of superpixels within one frame.
struct Subregion {
  int frame_index = 0;
  std::vector<int> pixels;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double mean_intensity = 0.0;
  double intensity_variance = 0.0;
};

struct SegmentationConfig {
  int target_superpixels = 200;
  double compactness = 10.0;
  double merge_threshold = 12.0;      // intensity-feature units
  double center_threshold = 20.0;     // px, cross-frame adjacency
  double similarity_threshold = 8.0;  // stopping rule for linking

  void validate() const;
};

// SLIC-style local k-means over (x, y, intensity) followed by a
// connectivity pass. Superpixels partition the frame, each one
// 4-connected, count within +-50% of target_count.
std::vector<Superpixel> oversegment(const Frame& frame, int target_count,
                                    double compactness);

// Agglomerative merge of spatially adjacent superpixels: repeatedly fuse
// the pair with smallest (mean, variance) feature distance while that
// distance is below merge_threshold.
std::vector<Subregion> segment_frame(const Frame& frame,
                                     const std::vector<Superpixel>& superpixels,
                                     int frame_index, double merge_threshold);

// Links similar subregions across adjacent frames (|k - k'| = 1, centroid
// distance < center_threshold), most-similar pair first, until no eligible
// pair is closer than similarity_threshold. Ties break toward the lowest
// (frame, subregion) index pair.
GroupPartition link_frames(const std::vector<std::vector<Subregion>>& per_frame,
                           int pixels_per_frame, double center_threshold,
                           double similarity_threshold);

// Whole pipeline over a sequence: oversegment and merge each frame, then
// link across frames.
GroupPartition video_segmentation(const FrameSequence& seq,
                                  const SegmentationConfig& config);

}  // namespace dynabg

#endif
