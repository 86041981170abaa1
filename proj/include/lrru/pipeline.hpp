#pragma once

#include <optional>
#include <vector>

#include "lrru/config.hpp"
#include "lrru/depth_map.hpp"
#include "lrru/params.hpp"
#include "lrru/tdu.hpp"
#include "lrru/tensor.hpp"

namespace lrru {

struct ForwardOutput {
  Tensor initial;                    // pre-filled depth, (N,1,H,W) in mm
  std::vector<Tensor> updates;       // one refined depth per iteration, in mm
  std::vector<KernelField> kernels;  // kernel used by each iteration
};

/// Recurrent refinement on batched tensors. rgb is (N,3,H,W) in [0,1] (ignored
/// in depth-only mode); sparse and initial are (N,1,H,W) in millimetres.
ForwardOutput lrru_forward_batch(const std::optional<Tensor>& rgb, const Tensor& sparse,
                                 const Tensor& initial, const ModelParams& params,
                                 const LrruConfig& cfg);

/// Smallest depth a prediction may take: one unit of the 16-bit PNG encoding.
inline constexpr double kMinPredictionMm = 1000.0 / 256.0;

/// Refined depth tensor sample -> depth map clamped to [kMinPredictionMm, max_depth_mm].
DepthMap to_prediction(const Tensor& depth, const LrruConfig& cfg, std::int64_t n = 0);

/// Pre-fills `sparse` and returns every intermediate refined map.
std::vector<DepthMap> lrru_forward(const std::optional<RgbImage>& rgb, const DepthMap& sparse,
                                   const ModelParams& params, const LrruConfig& cfg);

/// Loss weight of each supervised output, earliest first: gamma^(N-i), i = 2..N.
std::vector<double> iteration_weights(int iterations, double gamma);

/// Exponentially weighted masked L1/L2 loss averaged over valid ground-truth
/// pixels. preds are the refined maps, gt and mask are (N,1,H,W).
Tensor lrru_loss(const std::vector<Tensor>& preds, const Tensor& gt, const Tensor& mask,
                 const LrruConfig& cfg);

/// Final refined depth. With tta, also runs the mirrored input and averages
/// the result with the mirrored-back prediction.
DepthMap infer(const std::optional<RgbImage>& rgb, const DepthMap& sparse,
               const ModelParams& params, const LrruConfig& cfg, bool tta = false);

/// Same as infer but starting from an existing pre-filled map.
DepthMap infer_prefilled(const std::optional<RgbImage>& rgb, const DepthMap& sparse,
                         const DepthMap& initial, const ModelParams& params,
                         const LrruConfig& cfg, bool tta = false);

}  // namespace lrru
