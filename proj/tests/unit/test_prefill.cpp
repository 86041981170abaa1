#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lrru/error.hpp"
#include "lrru/prefill.hpp"
#include "test_util.hpp"

using namespace lrru;
using lrru::testing::random_sparse;

namespace {

// Straightforward reference of the densification pipeline working on
// inverted depth max_depth - d, with every neighbourhood scanned pixel by pixel.
struct Grid {
  int h, w;
  std::vector<double> v;
  std::vector<bool> ok;
};

Grid morph(const Grid& g, int size, bool diamond, bool take_max) {
  Grid out{g.h, g.w, std::vector<double>(g.v.size(), 0.0), std::vector<bool>(g.v.size(), false)};
  const int r = size / 2;
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) {
      bool any = false;
      double best = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (diamond && std::abs(dy) + std::abs(dx) > r) continue;
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || xx < 0 || yy >= g.h || xx >= g.w) continue;
          const std::size_t i = static_cast<std::size_t>(yy * g.w + xx);
          if (!g.ok[i]) continue;
          if (!any || (take_max ? g.v[i] > best : g.v[i] < best)) best = g.v[i];
          any = true;
        }
      const std::size_t o = static_cast<std::size_t>(y * g.w + x);
      out.ok[o] = any;
      out.v[o] = best;
    }
  return out;
}

void fill_from(Grid& g, const Grid& src) {
  for (std::size_t i = 0; i < g.v.size(); ++i)
    if (!g.ok[i] && src.ok[i]) {
      g.v[i] = src.v[i];
      g.ok[i] = true;
    }
}

DepthMap reference_prefill(const DepthMap& sparse, double max_depth) {
  Grid g{sparse.height, sparse.width, std::vector<double>(sparse.size()), std::vector<bool>(sparse.size())};
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    g.ok[i] = sparse.valid[i] != 0;
    g.v[i] = g.ok[i] ? max_depth - sparse.depth[i] : 0.0;
  }
  g = morph(g, 5, true, true);
  g = morph(morph(g, 5, false, true), 5, false, false);
  fill_from(g, morph(g, 7, false, true));
  while (std::find(g.ok.begin(), g.ok.end(), false) != g.ok.end()) fill_from(g, morph(g, 31, false, true));
  Grid med = g;
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) {
      std::vector<double> win;
      for (int yy = std::max(0, y - 2); yy <= std::min(g.h - 1, y + 2); ++yy)
        for (int xx = std::max(0, x - 2); xx <= std::min(g.w - 1, x + 2); ++xx) win.push_back(g.v[static_cast<std::size_t>(yy * g.w + xx)]);
      std::sort(win.begin(), win.end());
      med.v[static_cast<std::size_t>(y * g.w + x)] = win[(win.size() - 1) / 2];
    }
  DepthMap out(sparse.height, sparse.width);
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) {
      const std::size_t i = out.index(y, x);
      out.set(y, x, sparse.valid[i] ? sparse.depth[i] : max_depth - med.v[i]);
    }
  return out;
}

DepthMap from_values(int h, int w, const std::vector<double>& v) {
  DepthMap m(h, w);
  for (int i = 0; i < h * w; ++i)
    if (v[static_cast<std::size_t>(i)] > 0) m.set(i / w, i % w, v[static_cast<std::size_t>(i)]);
  return m;
}

}  // namespace

TEST_CASE("structuring elements") {
  const KernelMask d = KernelMask::diamond(5);
  CHECK(std::count(d.on.begin(), d.on.end(), 1) == 13);
  const KernelMask f = KernelMask::full_square(7);
  CHECK(std::count(f.on.begin(), f.on.end(), 1) == 49);
  CHECK_THROWS_AS(KernelMask::full_square(4), UsageError);
  CHECK_THROWS_AS(KernelMask::diamond(0), UsageError);
  CHECK_THROWS_AS(median_filter(DepthMap(3, 3), 2), UsageError);
}

TEST_CASE("dilation spreads maxima over the kernel footprint") {
  DepthMap m(7, 7);
  m.set(3, 3, 5.0);
  m.set(0, 0, 2.0);
  const DepthMap d = dilate(m, KernelMask::diamond(5));
  CHECK(d.depth[d.index(3, 1)] == 5.0);
  CHECK(d.depth[d.index(1, 3)] == 5.0);
  CHECK(d.depth[d.index(2, 2)] == 5.0);
  CHECK_FALSE(d.valid[d.index(1, 5)]);  // |dy| + |dx| = 4
  CHECK(d.depth[d.index(0, 1)] == 2.0);
  CHECK(d.depth[d.index(1, 1)] == 2.0);  // (3, 3) is 4 steps away
}

TEST_CASE("closing equals erosion after dilation and removes a gap") {
  const DepthMap m = from_values(1, 7, {4, 4, 4, 1, 4, 4, 4});
  const KernelMask k = KernelMask::full_square(3);
  CHECK(close(m, k) == erode(dilate(m, k), k));
  const DepthMap c = close(m, k);
  CHECK(c.depth[3] == 4.0);
  CHECK(erode(m, k).depth[2] == 1.0);
}

TEST_CASE("median filter takes the lower median of valid neighbours") {
  const DepthMap m = from_values(1, 5, {1, 9, 0, 3, 7});
  const DepthMap med = median_filter(m, 3);
  CHECK(med.depth[0] == 1.0);  // {1, 9}
  CHECK(med.depth[1] == 1.0);  // {1, 9}
  CHECK(med.depth[2] == 3.0);  // {9, 3}
  CHECK(med.depth[3] == 3.0);  // {3, 7}
  CHECK(med.depth[4] == 3.0);
}

TEST_CASE("single seed fills the whole map") {
  DepthMap s(20, 17);
  s.set(4, 9, 3210.5);
  const DepthMap p = prefill(s, 10000.0);
  REQUIRE(p.fully_valid());
  for (double v : p.depth) CHECK(v == 3210.5);
}

TEST_CASE("two seeds: the nearer depth wins around both") {
  DepthMap s(16, 16);
  s.set(3, 3, 1000.0);
  s.set(12, 12, 6000.0);
  const DepthMap p = prefill(s, 10000.0);
  const DepthMap ref = reference_prefill(s, 10000.0);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.depth[i] == doctest::Approx(ref.depth[i]).epsilon(1e-12));
  CHECK(p.depth[p.index(3, 3)] == 1000.0);
  CHECK(p.depth[p.index(12, 12)] == 6000.0);
  CHECK(p.depth[p.index(12, 11)] == 6000.0);
  CHECK(p.depth[p.index(3, 4)] == 1000.0);
}

TEST_CASE("prefill matches the pixel-by-pixel reference") {
  for (int trial = 0; trial < 12; ++trial) {
    const double density = 0.002 + 0.04 * trial;
    DepthMap s = random_sparse(24, 20, density, 100 + trial);
    if (s.valid_count() == 0) s.set(5, 5, 4000.0);
    const DepthMap p = prefill(s, 10000.0);
    const DepthMap ref = reference_prefill(s, 10000.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      INFO("trial " << trial << " pixel " << i);
      CHECK(p.depth[i] == doctest::Approx(ref.depth[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("dense input is returned unchanged") {
  DepthMap s = random_sparse(9, 11, 1.1, 7);
  REQUIRE(s.fully_valid());
  CHECK(prefill(s, 10000.0) == s);
}

TEST_CASE("prefill output is dense, keeps seeds and stays within the seed range") {
  for (int trial = 0; trial < 20; ++trial) {
    DepthMap s = random_sparse(32, 32, 0.001 + 0.025 * trial, 200 + trial);
    if (s.valid_count() == 0) s.set(0, 31, 800.0);
    const DepthMap p = prefill(s, 10000.0);
    REQUIRE(p.fully_valid());
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.valid[i]) continue;
      lo = std::min(lo, s.depth[i]);
      hi = std::max(hi, s.depth[i]);
      CHECK(p.depth[i] == s.depth[i]);
    }
    for (double v : p.depth) CHECK((v >= lo && v <= hi));
  }
}

TEST_CASE("prefill input errors") {
  CHECK_THROWS_AS(prefill(DepthMap(8, 8), 10000.0), DataError);
  DepthMap s(4, 4);
  s.set(1, 1, 20000.0);
  CHECK_THROWS_AS(prefill(s, 10000.0), DataError);
}
