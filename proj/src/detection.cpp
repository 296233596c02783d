#include "dynabg/detection.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace dynabg {

PipelineMode parse_pipeline_mode(const std::string& name) {
  if (name == "rpca-pixel") return PipelineMode::RpcaPixel;
  if (name == "rpca-stable") return PipelineMode::RpcaStable;
  if (name == "sc-rpca-stable") return PipelineMode::ScRpcaStable;
  throw std::invalid_argument(
      "unknown mode '" + name + "' (expected rpca-pixel, rpca-stable or sc-rpca-stable)");
}

std::string to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::RpcaPixel: return "rpca-pixel";
    case PipelineMode::RpcaStable: return "rpca-stable";
    case PipelineMode::ScRpcaStable: return "sc-rpca-stable";
  }
  return "?";
}

void DetectionConfig::validate() const {
  pooling.validate();
  segmentation.validate();
  solver.validate();
  if (binarize_epsilon < 0.0) {
    throw std::invalid_argument("epsilon must be >= 0");
  }
}

MaskSequence binarize(const Eigen::MatrixXd& e, double epsilon, int width, int height) {
  if (!e.allFinite()) throw std::invalid_argument("sparse term has non-finite entries");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (static_cast<Eigen::Index>(width) * height != e.rows()) {
    throw std::invalid_argument("mask shape " + std::to_string(width) + "x" +
                                std::to_string(height) + " does not match " +
                                std::to_string(e.rows()) + " matrix rows");
  }
  MaskSequence masks;
  masks.frames.reserve(static_cast<std::size_t>(e.cols()));
  for (Eigen::Index k = 0; k < e.cols(); ++k) {
    Frame mask(width, height);
    for (Eigen::Index j = 0; j < e.rows(); ++j) {
      mask.data[static_cast<std::size_t>(j)] = std::abs(e(j, k)) > epsilon ? 255 : 0;
    }
    masks.frames.push_back(std::move(mask));
  }
  return masks;
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& err) {
    throw std::runtime_error(std::string(name) + ": " + err.what());
  }
}

}  // namespace

DetectionResult detect(const FrameSequence& seq, const DetectionConfig& config) {
  config.validate();
  seq.validate();
  if (seq.size() < 2) {
    throw std::invalid_argument("need at least 2 frames, got " +
                                std::to_string(seq.size()));
  }

  DetectionResult result;
  if (config.mode == PipelineMode::RpcaPixel) {
    result.features = seq;
  } else {
    result.features = stage("pooling", [&] { return pool_sequence(seq, config.pooling); });
  }

  if (config.mode == PipelineMode::ScRpcaStable) {
    result.partition = stage("segmentation", [&] {
      return video_segmentation(result.features, config.segmentation);
    });
  }

  const PixelMatrix d = stage("stacking", [&] { return stack(result.features); });

  result.decomposition = stage("solver", [&] {
    return config.mode == PipelineMode::ScRpcaStable
               ? solve_sc_rpca(d, result.partition, config.solver, config.weight_mode)
               : solve_rpca(d, config.solver);
  });

  result.masks = stage("binarize", [&] {
    return binarize(result.decomposition.E, config.binarize_epsilon, seq.width(),
                    seq.height());
  });
  return result;
}

}  // namespace dynabg
