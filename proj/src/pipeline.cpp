#include "lrru/pipeline.hpp"

#include <cmath>

#include "lrru/error.hpp"
#include "lrru/guidance.hpp"
#include "lrru/ops.hpp"
#include "lrru/prefill.hpp"

namespace lrru {

ForwardOutput lrru_forward_batch(const std::optional<Tensor>& rgb, const Tensor& sparse,
                                 const Tensor& initial, const ModelParams& params,
                                 const LrruConfig& cfg) {
  if (sparse.shape() != initial.shape()) {
    throw DimensionError("initial depth " + initial.shape().str() + " does not match sparse " +
                         sparse.shape().str());
  }
  const double inv_max = 1.0 / cfg.max_depth_mm;
  const Shape s = sparse.shape();
  const GuidanceFeatures feats = extract_cross_guided(
      cfg.depth_only ? std::nullopt : rgb, ops::scale(sparse, inv_max), params, cfg);

  ForwardOutput out;
  out.initial = initial;
  Tensor current = initial;
  for (int t = 0; t < cfg.iterations; ++t) {
    const int idx = guidance_index(cfg.scale_schedule[static_cast<std::size_t>(t)]);
    const Tensor cross = upsample_guidance_scale(feats, idx, s.h, s.w);
    const Tensor self = extract_self_guided(ops::scale(current, inv_max), params);
    KernelField kf = predict_kernel(cross, self, TduHead::from_params(params, t), cfg.kernel_size);
    current = apply_update(current, kf);
    out.updates.push_back(current);
    out.kernels.push_back(std::move(kf));
  }
  return out;
}

namespace {

std::optional<Tensor> rgb_tensor(const std::optional<RgbImage>& rgb, const LrruConfig& cfg) {
  if (cfg.depth_only) return std::nullopt;
  if (!rgb) throw DataError("RGB image required unless depth_only is set");
  return rgb_batch_tensor({&*rgb});
}

}  // namespace

DepthMap to_prediction(const Tensor& depth, const LrruConfig& cfg, std::int64_t n) {
  return prediction_from_tensor(depth, kMinPredictionMm, cfg.max_depth_mm, n);
}

std::vector<DepthMap> lrru_forward(const std::optional<RgbImage>& rgb, const DepthMap& sparse,
                                   const ModelParams& params, const LrruConfig& cfg) {
  const NoGradGuard no_grad;
  const DepthMap initial = prefill(sparse, cfg.max_depth_mm);
  const ForwardOutput fw = lrru_forward_batch(rgb_tensor(rgb, cfg), depth_batch_tensor({&sparse}),
                                              depth_batch_tensor({&initial}), params, cfg);
  std::vector<DepthMap> maps;
  for (const Tensor& t : fw.updates) maps.push_back(to_prediction(t, cfg));
  return maps;
}

std::vector<double> iteration_weights(int iterations, double gamma) {
  const int n = iterations + 1;
  std::vector<double> w;
  for (int i = 2; i <= n; ++i) w.push_back(std::pow(gamma, n - i));
  return w;
}

Tensor lrru_loss(const std::vector<Tensor>& preds, const Tensor& gt, const Tensor& mask,
                 const LrruConfig& cfg) {
  if (static_cast<int>(preds.size()) != cfg.iterations) {
    throw DimensionError("loss expects one prediction per iteration");
  }
  double count = 0.0;
  for (double m : mask.data()) count += m;
  if (count <= 0.0) throw DataError("loss: ground truth has no valid pixels");
  const std::vector<double> weights = iteration_weights(cfg.iterations, cfg.gamma);
  Tensor total;
  for (LossTerm term : cfg.loss_terms) {
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const Tensor diff = ops::mul(ops::sub(preds[i], gt), mask);
      const Tensor err = term == LossTerm::kL1 ? ops::abs(diff) : ops::square(diff);
      const Tensor part = ops::scale(ops::sum(err), weights[i] / count);
      total = total.defined() ? ops::add(total, part) : part;
    }
  }
  return total;
}

DepthMap infer_prefilled(const std::optional<RgbImage>& rgb, const DepthMap& sparse,
                         const DepthMap& initial, const ModelParams& params,
                         const LrruConfig& cfg, bool tta) {
  const NoGradGuard no_grad;
  const ForwardOutput fw = lrru_forward_batch(rgb_tensor(rgb, cfg), depth_batch_tensor({&sparse}),
                                              depth_batch_tensor({&initial}), params, cfg);
  DepthMap out = to_prediction(fw.updates.back(), cfg);
  if (!tta) return out;

  const std::optional<RgbImage> rgb_flip =
      rgb ? std::optional<RgbImage>(flip_horizontal(*rgb)) : std::nullopt;
  const DepthMap sparse_flip = flip_horizontal(sparse);
  const DepthMap initial_flip = flip_horizontal(initial);
  const ForwardOutput fw_flip =
      lrru_forward_batch(rgb_tensor(rgb_flip, cfg), depth_batch_tensor({&sparse_flip}),
                         depth_batch_tensor({&initial_flip}), params, cfg);
  const DepthMap back = flip_horizontal(to_prediction(fw_flip.updates.back(), cfg));
  for (std::size_t i = 0; i < out.size(); ++i) out.depth[i] = 0.5 * (out.depth[i] + back.depth[i]);
  return out;
}

DepthMap infer(const std::optional<RgbImage>& rgb, const DepthMap& sparse,
               const ModelParams& params, const LrruConfig& cfg, bool tta) {
  return infer_prefilled(rgb, sparse, prefill(sparse, cfg.max_depth_mm), params, cfg, tta);
}

}  // namespace lrru
