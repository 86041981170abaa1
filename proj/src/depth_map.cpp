#include "lrru/depth_map.hpp"

#include <algorithm>

#include "lrru/error.hpp"

namespace lrru {

DepthMap::DepthMap(int h, int w)
    : height(h),
      width(w),
      depth(static_cast<std::size_t>(h) * w, 0.0),
      valid(static_cast<std::size_t>(h) * w, 0) {
  if (h < 0 || w < 0) throw DimensionError("negative depth map extent");
}

std::size_t DepthMap::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

void DepthMap::set(int y, int x, double d) {
  depth[index(y, x)] = d;
  valid[index(y, x)] = 1;
}

void DepthMap::clear(int y, int x) {
  depth[index(y, x)] = 0.0;
  valid[index(y, x)] = 0;
}

DepthMap flip_horizontal(const DepthMap& map) {
  DepthMap out(map.height, map.width);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const std::size_t src = map.index(y, map.width - 1 - x);
      out.depth[out.index(y, x)] = map.depth[src];
      out.valid[out.index(y, x)] = map.valid[src];
    }
  }
  return out;
}

RgbImage flip_horizontal(const RgbImage& image) {
  RgbImage out(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = image.at(y, image.width - 1 - x, c);
    }
  }
  return out;
}

namespace {

template <typename T>
void check_batch(const std::vector<const T*>& items) {
  if (items.empty()) throw DimensionError("empty batch");
  for (const T* it : items) {
    if (it->height != items[0]->height || it->width != items[0]->width) {
      throw DimensionError("batch members differ in extent");
    }
  }
}

}  // namespace

Tensor depth_batch_tensor(const std::vector<const DepthMap*>& maps, double scale) {
  check_batch(maps);
  const int h = maps[0]->height;
  const int w = maps[0]->width;
  std::vector<double> values;
  values.reserve(maps.size() * static_cast<std::size_t>(h) * w);
  for (const DepthMap* m : maps) {
    for (std::size_t i = 0; i < m->size(); ++i) values.push_back(m->valid[i] ? m->depth[i] * scale : 0.0);
  }
  return Tensor({static_cast<std::int64_t>(maps.size()), 1, h, w}, std::move(values));
}

Tensor mask_batch_tensor(const std::vector<const DepthMap*>& maps) {
  check_batch(maps);
  std::vector<double> values;
  for (const DepthMap* m : maps) {
    for (std::uint8_t v : m->valid) values.push_back(v ? 1.0 : 0.0);
  }
  return Tensor({static_cast<std::int64_t>(maps.size()), 1, maps[0]->height, maps[0]->width},
                std::move(values));
}

Tensor rgb_batch_tensor(const std::vector<const RgbImage*>& images) {
  check_batch(images);
  const int h = images[0]->height;
  const int w = images[0]->width;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<double> values(images.size() * 3 * plane);
  for (std::size_t n = 0; n < images.size(); ++n) {
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < plane; ++i) {
        values[(n * 3 + c) * plane + i] = images[n]->data[i * 3 + c];
      }
    }
  }
  return Tensor({static_cast<std::int64_t>(images.size()), 3, h, w}, std::move(values));
}

DepthMap depth_from_tensor(const Tensor& t, std::int64_t n) {
  const Shape s = t.shape();
  if (s.c != 1 || n < 0 || n >= s.n) throw DimensionError("depth_from_tensor: bad shape " + s.str());
  DepthMap out(static_cast<int>(s.h), static_cast<int>(s.w));
  const auto d = t.data();
  std::copy_n(d.begin() + n * s.plane(), s.plane(), out.depth.begin());
  std::fill(out.valid.begin(), out.valid.end(), std::uint8_t{1});
  return out;
}

DepthMap prediction_from_tensor(const Tensor& t, double min_mm, double max_mm, std::int64_t n) {
  DepthMap out = depth_from_tensor(t, n);
  for (double& d : out.depth) d = std::clamp(d, min_mm, max_mm);
  return out;
}

}  // namespace lrru
