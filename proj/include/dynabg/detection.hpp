#ifndef DYNABG_DETECTION_HPP
#define DYNABG_DETECTION_HPP

#include <string>

#include "dynabg/frame.hpp"
#include "dynabg/gmp.hpp"
#include "dynabg/partition.hpp"
#include "dynabg/segmentation.hpp"
#include "dynabg/solver.hpp"

namespace dynabg {

// RpcaPixel: classic RPCA on raw pixels. RpcaStable: classic RPCA on
// pooled stable-values. ScRpcaStable: pooled stable-values plus the
// segmentation-constrained group norm.
enum class PipelineMode { RpcaPixel, RpcaStable, ScRpcaStable };

PipelineMode parse_pipeline_mode(const std::string& name);
std::string to_string(PipelineMode mode);

// Binary masks, 0 = background, 255 = foreground.
using MaskSequence = FrameSequence;

struct DetectionConfig {
  PoolingConfig pooling;
  SegmentationConfig segmentation;
  SolverConfig solver;
  double binarize_epsilon = 1e-6 * 255.0;
  WeightMode weight_mode = WeightMode::Sqrt;
  PipelineMode mode = PipelineMode::ScRpcaStable;

  void validate() const;
};

// Mask pixel = 255 iff |E_jk| > epsilon, reshaped per column.
MaskSequence binarize(const Eigen::MatrixXd& e, double epsilon, int width, int height);

struct DetectionResult {
  MaskSequence masks;
  Decomposition decomposition;
  GroupPartition partition;  // empty (rows = cols = 0) outside sc-rpca mode
  FrameSequence features;    // the frames the solver actually consumed
};

// Full pipeline: pool, segment, stack, decompose, binarize. Stages that a
// mode skips are skipped; errors are prefixed with the failing stage.
DetectionResult detect(const FrameSequence& seq, const DetectionConfig& config);

}  // namespace dynabg

#endif
