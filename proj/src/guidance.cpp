#include "lrru/guidance.hpp"

#include <cmath>
#include <random>
#include <string>

#include "lrru/error.hpp"
#include "lrru/ops.hpp"

namespace lrru {

namespace {

const char* const kDecoderNames[4] = {"d8", "d4", "d2", "d1"};

void add_conv(ModelParams& params, std::mt19937_64& rng, const std::string& name, int in, int out,
              int k, double gain = 1.0) {
  const double fan_in = static_cast<double>(in) * k * k;
  const double bound = gain * std::sqrt(6.0 / ((1.0 + kLeakySlope * kLeakySlope) * fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> w(static_cast<std::size_t>(out) * in * k * k);
  for (double& v : w) v = dist(rng);
  params.add(name + ".weight", Tensor({out, in, k, k}, std::move(w)));
  params.add(name + ".bias", Tensor::zeros({1, out, 1, 1}));
}

void add_zero_conv(ModelParams& params, const std::string& name, int in, int out, int k) {
  params.add(name + ".weight", Tensor::zeros({out, in, k, k}));
  params.add(name + ".bias", Tensor::zeros({1, out, 1, 1}));
}

Tensor conv(const Tensor& x, const ModelParams& p, const std::string& name, int stride) {
  const Tensor& w = p.get(name + ".weight");
  return ops::conv2d(x, w, p.get(name + ".bias"), stride, static_cast<int>(w.shape().h / 2));
}

Tensor conv_act(const Tensor& x, const ModelParams& p, const std::string& name, int stride) {
  return ops::leaky_relu(conv(x, p, name, stride), kLeakySlope);
}

std::string stage_name(const char* encoder, int stage) {
  return std::string(encoder) + ".s" + std::to_string(stage);
}

Tensor encoder_stage(const Tensor& x, const ModelParams& p, const std::string& name, int stage) {
  Tensor y = conv_act(x, p, name + ".conv0", stage == 1 ? 1 : 2);
  return conv_act(y, p, name + ".conv1", 1);
}

}  // namespace

int guidance_index(double scale) {
  switch (upsample_factor(scale)) {
    case 8: return 0;
    case 4: return 1;
    case 2: return 2;
    default: return 3;
  }
}

int guidance_channels(const LrruConfig& cfg, int index) {
  // 1/8 -> stage 4, 1/4 -> stage 3, 1/2 -> stage 2, full -> stage 1.
  return cfg.channels[static_cast<std::size_t>(3 - index)];
}

ModelParams init_model_params(const LrruConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  ModelParams p;
  const auto& ch = cfg.channels;
  if (!cfg.depth_only) {
    int in = 3;
    for (int s = 1; s <= 5; ++s) {
      const int c = ch[static_cast<std::size_t>(s - 1)];
      add_conv(p, rng, stage_name("rgb_enc", s) + ".conv0", in, c, 3);
      add_conv(p, rng, stage_name("rgb_enc", s) + ".conv1", c, c, 3);
      in = c;
    }
  }
  int in = 1;
  for (int s = 1; s <= 5; ++s) {
    const int c = ch[static_cast<std::size_t>(s - 1)];
    add_conv(p, rng, stage_name("depth_enc", s) + ".conv0", in, c, 3);
    add_conv(p, rng, stage_name("depth_enc", s) + ".conv1", c, c, 3);
    add_conv(p, rng, stage_name("fuse", s), c, c, 3);
    in = c;
  }
  int prev = ch[4];
  for (int i = 0; i < 4; ++i) {
    const int c = guidance_channels(cfg, i);
    const std::string name = std::string("dec.") + kDecoderNames[i];
    add_conv(p, rng, name + ".up", prev, c, 3);
    add_conv(p, rng, name + ".refine", c, c, 3);
    add_conv(p, rng, name + ".out", c, c, 3);
    prev = c;
  }
  add_conv(p, rng, "self_guided", 1, ch[0], 3);
  const int k2 = cfg.kernel_size * cfg.kernel_size;
  for (int t = 0; t < cfg.iterations; ++t) {
    const int idx = guidance_index(cfg.scale_schedule[static_cast<std::size_t>(t)]);
    const int head_in = guidance_channels(cfg, idx) + ch[0];
    const std::string name = "tdu." + std::to_string(t);
    add_conv(p, rng, name + ".weight_head", head_in, k2, 1, 0.1);
    add_zero_conv(p, name + ".offset_head", head_in, 2 * (k2 - 1), 1);
  }
  return p;
}

GuidanceFeatures extract_cross_guided(const std::optional<Tensor>& rgb, const Tensor& sparse,
                                      const ModelParams& params, const LrruConfig& cfg) {
  const Shape s = sparse.shape();
  if (s.c != 1) throw DimensionError("sparse depth must have one channel");
  if (s.h % 8 != 0 || s.w % 8 != 0) {
    throw DimensionError("input extents " + std::to_string(s.h) + "x" + std::to_string(s.w) +
                         " must be divisible by 8; pad the input first");
  }
  const bool use_rgb = !cfg.depth_only;
  if (use_rgb) {
    if (!rgb) throw DimensionError("RGB input required unless depth_only is set");
    const Shape r = rgb->shape();
    if (r.n != s.n || r.c != 3 || r.h != s.h || r.w != s.w) {
      throw DimensionError("rgb shape " + r.str() + " does not match sparse " + s.str());
    }
  }

  std::array<Tensor, 5> fused;
  Tensor rgb_x = use_rgb ? *rgb : Tensor();
  Tensor depth_x = sparse;
  for (int st = 1; st <= 5; ++st) {
    Tensor d = encoder_stage(depth_x, params, stage_name("depth_enc", st), st);
    if (use_rgb) {
      rgb_x = encoder_stage(rgb_x, params, stage_name("rgb_enc", st), st);
      d = ops::add(d, rgb_x);
    }
    depth_x = conv_act(d, params, stage_name("fuse", st), 1);
    fused[static_cast<std::size_t>(st - 1)] = depth_x;
  }

  GuidanceFeatures out;
  Tensor x = fused[4];
  for (int i = 0; i < 4; ++i) {
    const Tensor& skip = fused[static_cast<std::size_t>(3 - i)];
    const std::string name = std::string("dec.") + kDecoderNames[i];
    Tensor u = ops::crop_spatial(ops::upsample_bilinear(x, 2), skip.shape().h, skip.shape().w);
    u = ops::add(conv_act(u, params, name + ".up", 1), skip);
    x = conv_act(u, params, name + ".refine", 1);
    out.scales[static_cast<std::size_t>(i)] = conv(x, params, name + ".out", 1);
  }
  return out;
}

Tensor extract_self_guided(const Tensor& target, const ModelParams& params) {
  if (target.shape().c != 1) throw DimensionError("target depth must have one channel");
  return conv_act(target, params, "self_guided", 1);
}

Tensor upsample_guidance_scale(const GuidanceFeatures& feats, int index, std::int64_t h,
                               std::int64_t w) {
  const Tensor& f = feats.scales.at(static_cast<std::size_t>(index));
  const int factor = 1 << (3 - index);
  return ops::crop_spatial(ops::upsample_bilinear(f, factor), h, w);
}

std::array<Tensor, 4> upsample_guidance(const GuidanceFeatures& feats, std::int64_t h,
                                        std::int64_t w) {
  std::array<Tensor, 4> out;
  for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = upsample_guidance_scale(feats, i, h, w);
  return out;
}

}  // namespace lrru
