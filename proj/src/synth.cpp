#include "lrru/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "lrru/error.hpp"
#include "lrru/png_io.hpp"

namespace lrru {

namespace {

struct Plane {
  double base = 0.0;    // depth at the image centre, mm
  double slope_y = 0.0;  // mm across the full image height
  double slope_x = 0.0;  // mm across the full image width

  double depth(double y, double x, int h, int w) const {
    return base + slope_y * (y / h - 0.5) + slope_x * (x / w - 0.5);
  }
};

struct Occluder {
  bool ellipse = false;
  double cy = 0.0;
  double cx = 0.0;
  double ry = 0.0;
  double rx = 0.0;
  Plane plane;

  bool covers(int y, int x) const {
    const double dy = (y + 0.5 - cy) / ry;
    const double dx = (x + 0.5 - cx) / rx;
    return ellipse ? dy * dy + dx * dx <= 1.0 : std::fabs(dy) <= 1.0 && std::fabs(dx) <= 1.0;
  }
};

using Color = std::array<double, 3>;

double color_distance(const Color& a, const Color& b) {
  return std::fabs(a[0] - b[0]) + std::fabs(a[1] - b[1]) + std::fabs(a[2] - b[2]);
}

// Lambertian factor of a plane under a fixed light, in [0.35, 1].
double shade_of(const Plane& p, double dmax) {
  const double lnorm = std::sqrt(0.3 * 0.3 + 0.5 * 0.5 + 1.0);
  const double gy = 4.0 * p.slope_y / dmax;
  const double gx = 4.0 * p.slope_x / dmax;
  const double nn = std::sqrt(gx * gx + gy * gy + 1.0);
  const double lambert = std::max(0.0, (-0.3 * gx + 0.5 * gy + 1.0) / (lnorm * nn));
  return 0.35 + 0.65 * lambert;
}

Color shaded(const Color& c, double shade) { return {c[0] * shade, c[1] * shade, c[2] * shade}; }

}  // namespace

SyntheticScene synth_scene(std::uint64_t seed, int height, int width, double max_depth_mm) {
  if (height <= 0 || width <= 0 || height % 8 != 0 || width % 8 != 0) {
    throw DimensionError("synthetic scene extents must be positive multiples of 8");
  }
  const double dmax = max_depth_mm;
  const double dmin = std::min(500.0, dmax);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto integer = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  const int regions = integer(3, 6);
  std::vector<std::array<double, 2>> sites;
  std::vector<Plane> planes;
  for (int r = 0; r < regions; ++r) {
    sites.push_back({uniform(0, height), uniform(0, width)});
    planes.push_back({uniform(0.45, 0.85) * dmax, uniform(-0.12, 0.12) * dmax,
                      uniform(-0.12, 0.12) * dmax});
  }
  const int occluder_count = integer(1, 3);
  std::vector<Occluder> occluders;
  for (int o = 0; o < occluder_count; ++o) {
    Occluder oc;
    oc.ellipse = integer(0, 1) == 1;
    oc.cy = uniform(0.15, 0.85) * height;
    oc.cx = uniform(0.15, 0.85) * width;
    oc.ry = uniform(0.1, 0.25) * height;
    oc.rx = uniform(0.1, 0.25) * width;
    oc.plane = {uniform(0.1, 0.3) * dmax, uniform(-0.03, 0.03) * dmax,
                uniform(-0.03, 0.03) * dmax};
    occluders.push_back(oc);
  }
  // Paint far occluders first so nearer ones end up on top.
  std::sort(occluders.begin(), occluders.end(),
            [](const Occluder& a, const Occluder& b) { return a.plane.base > b.plane.base; });

  // Albedos: background colours are free; each occluder's shaded colour is
  // kept well away from every shaded colour drawn before it.
  std::vector<Color> albedo;
  std::vector<Color> rendered;
  for (int r = 0; r < regions; ++r) {
    albedo.push_back({uniform(0.15, 0.9), uniform(0.15, 0.9), uniform(0.15, 0.9)});
    rendered.push_back(shaded(albedo.back(), shade_of(planes[static_cast<std::size_t>(r)], dmax)));
  }
  for (int o = 0; o < occluder_count; ++o) {
    const double shade = shade_of(occluders[static_cast<std::size_t>(o)].plane, dmax);
    Color best{};
    double best_gap = -1.0;
    for (int attempt = 0; attempt < 400 && best_gap < 0.45; ++attempt) {
      const Color c{uniform(0.1, 0.95), uniform(0.1, 0.95), uniform(0.1, 0.95)};
      double gap = 1e300;
      for (const Color& prev : rendered) gap = std::min(gap, color_distance(prev, shaded(c, shade)));
      if (gap > best_gap) {
        best_gap = gap;
        best = c;
      }
    }
    albedo.push_back(best);
    rendered.push_back(shaded(best, shade));
  }

  SyntheticScene scene;
  scene.first_occluder_label = regions;
  scene.labels.assign(static_cast<std::size_t>(height) * width, 0);
  DepthMap gt(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      int label = 0;
      double best = 1e300;
      for (int r = 0; r < regions; ++r) {
        const double dy = y + 0.5 - sites[static_cast<std::size_t>(r)][0];
        const double dx = x + 0.5 - sites[static_cast<std::size_t>(r)][1];
        const double d2 = dy * dy + dx * dx;
        if (d2 < best) {
          best = d2;
          label = r;
        }
      }
      const Plane* plane = &planes[static_cast<std::size_t>(label)];
      for (int o = 0; o < occluder_count; ++o) {
        if (occluders[static_cast<std::size_t>(o)].covers(y, x)) {
          label = regions + o;
          plane = &occluders[static_cast<std::size_t>(o)].plane;
        }
      }
      const std::size_t i = gt.index(y, x);
      scene.labels[i] = label;
      const double d = std::clamp(plane->depth(y + 0.5, x + 0.5, height, width), dmin, dmax);
      gt.set(y, x, std::clamp(quantize_depth_mm(d), dmin, dmax));
    }
  }

  // Shaded albedo plus low-amplitude noise.
  std::uniform_real_distribution<double> noise(-0.02, 0.02);
  RgbImage rgb(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = gt.index(y, x);
      const Color& a = rendered[static_cast<std::size_t>(scene.labels[i])];
      for (int c = 0; c < 3; ++c) {
        // Stored on the 8-bit grid so in-memory and on-disk samples agree.
        const double v = std::clamp(a[static_cast<std::size_t>(c)] + noise(rng), 0.0, 1.0);
        rgb.at(y, x, c) = std::round(v * 255.0) / 255.0;
      }
    }
  }

  scene.sample.rgb = std::move(rgb);
  scene.sample.sparse = DepthMap(height, width);
  scene.sample.gt = std::move(gt);
  return scene;
}

DepthMap sparsify_random(const DepthMap& gt, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt.valid[i]) candidates.push_back(i);
  }
  if (n > candidates.size()) {
    throw DataError("sparsify_random: requested " + std::to_string(n) + " samples but only " +
                    std::to_string(candidates.size()) + " pixels are valid");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, candidates.size() - 1);
    std::swap(candidates[k], candidates[pick(rng)]);
  }
  DepthMap out(gt.height, gt.width);
  for (std::size_t k = 0; k < n; ++k) {
    out.depth[candidates[k]] = gt.depth[candidates[k]];
    out.valid[candidates[k]] = 1;
  }
  return out;
}

DepthMap sparsify_lines(const DepthMap& gt, int keep_every, int jitter, std::uint64_t seed) {
  if (keep_every < 1) throw UsageError("sparsify_lines: keep_every must be >= 1");
  if (jitter < 0) throw UsageError("sparsify_lines: jitter must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> jit(0, jitter);
  DepthMap out(gt.height, gt.width);
  for (int y = 0; y < gt.height; ++y) {
    const int j = jit(rng);
    if ((y + j) % keep_every != 0) continue;
    for (int x = 0; x < gt.width; ++x) {
      const std::size_t i = gt.index(y, x);
      out.depth[i] = gt.depth[i];
      out.valid[i] = gt.valid[i];
    }
  }
  return out;
}

Sparsity Sparsity::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("sparsity must be random:N or lines:K");
  const std::string mode = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  long parsed = 0;
  try {
    std::size_t used = 0;
    parsed = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
  } catch (const std::exception&) {
    throw UsageError("invalid sparsity value '" + value + "'");
  }
  Sparsity s;
  if (mode == "random" && parsed >= 0) {
    s.mode = Mode::kRandom;
    s.count = static_cast<std::size_t>(parsed);
  } else if (mode == "lines" && parsed >= 1) {
    s.mode = Mode::kLines;
    s.keep_every = static_cast<int>(parsed);
  } else {
    throw UsageError("invalid sparsity '" + text + "'");
  }
  return s;
}

std::string Sparsity::str() const {
  return mode == Mode::kRandom ? "random:" + std::to_string(count)
                               : "lines:" + std::to_string(keep_every);
}

DepthMap Sparsity::apply(const DepthMap& gt, std::uint64_t seed) const {
  return mode == Mode::kRandom ? sparsify_random(gt, count, seed)
                               : sparsify_lines(gt, keep_every, jitter, seed);
}

DepthSample synth_sample(std::uint64_t seed, int height, int width, double max_depth_mm,
                         const Sparsity& sparsity) {
  SyntheticScene scene = synth_scene(seed, height, width, max_depth_mm);
  scene.sample.sparse = sparsity.apply(scene.sample.gt, seed ^ 0x9e3779b97f4a7c15ULL);
  return std::move(scene.sample);
}

}  // namespace lrru
