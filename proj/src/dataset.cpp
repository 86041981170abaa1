#include "lrru/dataset.hpp"

#include <algorithm>
#include <cstdio>

#include "lrru/error.hpp"
#include "lrru/png_io.hpp"

namespace lrru {

namespace fs = std::filesystem;

std::string sample_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

void write_dataset(const fs::path& dir, const std::vector<DepthSample>& samples) {
  const bool any_rgb = std::any_of(samples.begin(), samples.end(),
                                   [](const DepthSample& s) { return s.rgb.has_value(); });
  fs::create_directories(dir / "sparse");
  fs::create_directories(dir / "gt");
  if (any_rgb) fs::create_directories(dir / "rgb");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string name = sample_stem(i) + ".png";
    if (samples[i].rgb) write_rgb_png(*samples[i].rgb, dir / "rgb" / name);
    write_depth_png(samples[i].sparse, dir / "sparse" / name);
    write_depth_png(samples[i].gt, dir / "gt" / name);
  }
}

std::vector<fs::path> list_pngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<DepthSample> load_dataset(const fs::path& dir) {
  const auto sparse_files = list_pngs(dir / "sparse");
  if (sparse_files.empty()) throw DataError("dataset has no samples: " + dir.string());
  const bool has_rgb = fs::is_directory(dir / "rgb");
  std::vector<DepthSample> out;
  for (const auto& sp : sparse_files) {
    const auto name = sp.filename();
    DepthSample s;
    s.sparse = read_depth_png(sp);
    if (!fs::exists(dir / "gt" / name)) throw DataError("missing ground truth for " + name.string());
    s.gt = read_depth_png(dir / "gt" / name);
    if (has_rgb) {
      if (!fs::exists(dir / "rgb" / name)) throw DataError("missing rgb for " + name.string());
      s.rgb = read_rgb_png(dir / "rgb" / name);
    }
    if (s.gt.height != s.sparse.height || s.gt.width != s.sparse.width ||
        (s.rgb && (s.rgb->height != s.sparse.height || s.rgb->width != s.sparse.width))) {
      throw DimensionError("sample " + name.string() + " has mismatched extents");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace lrru
