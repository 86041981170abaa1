#include "lrru/prefill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrru/error.hpp"

namespace lrru {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

void check_odd(int size, const char* what) {
  if (size < 1 || size % 2 == 0) {
    throw UsageError(std::string(what) + ": kernel extent must be odd, got " +
                     std::to_string(size));
  }
}

// Separable running extremum over a full rectangular window.
template <typename Better>
DepthMap rect_extremum(const DepthMap& map, int kh, int kw, double sentinel, Better better) {
  const int h = map.height;
  const int w = map.width;
  const int ry = kh / 2;
  const int rx = kw / 2;
  std::vector<double> rows(map.size(), sentinel);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = sentinel;
      for (int xx = std::max(0, x - rx); xx <= std::min(w - 1, x + rx); ++xx) {
        const std::size_t i = map.index(y, xx);
        if (map.valid[i] && better(map.depth[i], best)) best = map.depth[i];
      }
      rows[map.index(y, x)] = best;
    }
  }
  DepthMap out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = sentinel;
      for (int yy = std::max(0, y - ry); yy <= std::min(h - 1, y + ry); ++yy) {
        const double v = rows[map.index(yy, x)];
        if (better(v, best)) best = v;
      }
      if (best != sentinel) out.set(y, x, best);
    }
  }
  return out;
}

template <typename Better>
DepthMap masked_extremum(const DepthMap& map, const KernelMask& k, double sentinel, Better better) {
  check_odd(k.height, "morphology");
  check_odd(k.width, "morphology");
  if (k.full) return rect_extremum(map, k.height, k.width, sentinel, better);
  const int ry = k.height / 2;
  const int rx = k.width / 2;
  DepthMap out(map.height, map.width);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      double best = sentinel;
      for (int ky = 0; ky < k.height; ++ky) {
        const int yy = y + ky - ry;
        if (yy < 0 || yy >= map.height) continue;
        for (int kx = 0; kx < k.width; ++kx) {
          const int xx = x + kx - rx;
          if (xx < 0 || xx >= map.width || !k.on[static_cast<std::size_t>(ky * k.width + kx)]) continue;
          const std::size_t i = map.index(yy, xx);
          if (map.valid[i] && better(map.depth[i], best)) best = map.depth[i];
        }
      }
      if (best != sentinel) out.set(y, x, best);
    }
  }
  return out;
}

// Copies values from `source` into pixels of `target` that are still invalid.
void fill_invalid_from(DepthMap& target, const DepthMap& source) {
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (!target.valid[i] && source.valid[i]) {
      target.depth[i] = source.depth[i];
      target.valid[i] = 1;
    }
  }
}

DepthMap negated(const DepthMap& map) {
  DepthMap out = map;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.valid[i]) out.depth[i] = -out.depth[i];
  }
  return out;
}

}  // namespace

KernelMask KernelMask::full_square(int size) {
  check_odd(size, "full_square");
  KernelMask k;
  k.height = k.width = size;
  k.on.assign(static_cast<std::size_t>(size) * size, 1);
  k.full = true;
  return k;
}

KernelMask KernelMask::diamond(int size) {
  check_odd(size, "diamond");
  KernelMask k;
  k.height = k.width = size;
  k.on.assign(static_cast<std::size_t>(size) * size, 0);
  const int r = size / 2;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (std::abs(y - r) + std::abs(x - r) <= r) k.on[static_cast<std::size_t>(y * size + x)] = 1;
    }
  }
  k.full = size == 1;
  return k;
}

DepthMap dilate(const DepthMap& map, const KernelMask& kernel) {
  return masked_extremum(map, kernel, kNegInf, [](double a, double b) { return a > b; });
}

DepthMap erode(const DepthMap& map, const KernelMask& kernel) {
  return masked_extremum(map, kernel, kPosInf, [](double a, double b) { return a < b; });
}

DepthMap close(const DepthMap& map, const KernelMask& kernel) {
  return erode(dilate(map, kernel), kernel);
}

DepthMap median_filter(const DepthMap& map, int size) {
  check_odd(size, "median_filter");
  const int r = size / 2;
  DepthMap out(map.height, map.width);
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      window.clear();
      for (int yy = std::max(0, y - r); yy <= std::min(map.height - 1, y + r); ++yy) {
        for (int xx = std::max(0, x - r); xx <= std::min(map.width - 1, x + r); ++xx) {
          const std::size_t i = map.index(yy, xx);
          if (map.valid[i]) window.push_back(map.depth[i]);
        }
      }
      if (window.empty()) continue;
      auto mid = window.begin() + static_cast<std::ptrdiff_t>((window.size() - 1) / 2);
      std::nth_element(window.begin(), mid, window.end());
      out.set(y, x, *mid);
    }
  }
  return out;
}

DepthMap prefill(const DepthMap& sparse, double max_depth_mm) {
  if (sparse.valid_count() == 0) throw DataError("prefill: empty input (no valid pixels)");
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    if (sparse.valid[i] && !(sparse.depth[i] > 0.0 && sparse.depth[i] <= max_depth_mm)) {
      throw DataError("prefill: valid depth outside (0, max_depth_mm]");
    }
  }

  // Work on inverted depth so that dilation favours near surfaces. Negation
  // reverses order exactly like max_depth - d and keeps every value exact.
  DepthMap work = negated(sparse);
  work = dilate(work, KernelMask::diamond(5));
  work = close(work, KernelMask::full_square(5));
  fill_invalid_from(work, dilate(work, KernelMask::full_square(7)));
  const KernelMask large = KernelMask::full_square(31);
  while (!work.fully_valid()) fill_invalid_from(work, dilate(work, large));

  const DepthMap median = median_filter(work, 5);
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (!sparse.valid[i]) work.depth[i] = median.depth[i];
  }

  DepthMap out = negated(work);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (sparse.valid[i]) out.depth[i] = sparse.depth[i];
  }
  return out;
}

}  // namespace lrru
