#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "lrru/config.hpp"
#include "lrru/params.hpp"
#include "lrru/tensor.hpp"

namespace lrru {

/// Cross-guided features at 1/8, 1/4, 1/2 and full resolution (coarse to fine).
struct GuidanceFeatures {
  std::array<Tensor, 4> scales;
};

/// Index into GuidanceFeatures::scales for a schedule scale (1/8 -> 0 ... 1 -> 3).
int guidance_index(double scale);

/// Channel width of the guidance feature at index 0..3.
int guidance_channels(const LrruConfig& cfg, int index);

/// Creates every learnable tensor: both encoders (the RGB one is omitted in
/// depth-only mode), fusion convs, decoder, the self-guided conv and one
/// weight/offset head pair per iteration. Weights use fan-in scaled centred
/// uniform init, biases start at zero and offset heads start at zero.
ModelParams init_model_params(const LrruConfig& cfg, std::uint64_t seed);

/// Multi-scale features from RGB (N,3,H,W) in [0,1] and sparse depth (N,1,H,W)
/// scaled to [0,1]. Pass std::nullopt for rgb in depth-only mode.
GuidanceFeatures extract_cross_guided(const std::optional<Tensor>& rgb, const Tensor& sparse,
                                      const ModelParams& params, const LrruConfig& cfg);

/// Single 3x3 conv + leaky activation over the current target depth in [0,1].
Tensor extract_self_guided(const Tensor& target, const ModelParams& params);

/// Bilinear upsampling of one guidance scale to h x w.
Tensor upsample_guidance_scale(const GuidanceFeatures& feats, int index, std::int64_t h,
                               std::int64_t w);
std::array<Tensor, 4> upsample_guidance(const GuidanceFeatures& feats, std::int64_t h,
                                        std::int64_t w);

inline constexpr double kLeakySlope = 0.1;

}  // namespace lrru
