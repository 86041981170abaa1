#include "lrru/ops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "lrru/error.hpp"

namespace lrru::ops {

namespace {

using detail::Node;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;
using Index = std::int64_t;

std::size_t sz(Index v) { return static_cast<std::size_t>(v); }

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape().str() + " vs " +
                         b.shape().str());
  }
}

// Gradient buffer of parent i, or nullptr when that parent takes no gradient.
double* parent_grad(Node& self, std::size_t i) {
  Node& p = *self.parents[i];
  if (!p.requires_grad) return nullptr;
  return p.grad_buffer().data();
}

// Elementwise unary op with derivative computed from (input, output).
template <typename F, typename D>
Tensor unary(const Tensor& x, F f, D dfdx, const char* name) {
  auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  return detail::make_result(
      x.shape(), std::move(out), {x},
      [dfdx](Node& self) {
        double* gx = parent_grad(self, 0);
        if (!gx) return;
        const auto& xin = self.parents[0]->data;
        for (std::size_t i = 0; i < xin.size(); ++i) {
          gx[i] += self.grad[i] * dfdx(xin[i], self.data[i]);
        }
      },
      name);
}

// im2col for one image: rows index (ic, ky, kx), columns index output pixels.
void im2col(const double* img, Index c, Index h, Index w, Index kh, Index kw, Index stride,
            Index pad, Index oh, Index ow, double* col) {
  for (Index ic = 0; ic < c; ++ic) {
    for (Index ky = 0; ky < kh; ++ky) {
      for (Index kx = 0; kx < kw; ++kx) {
        double* row = col + ((ic * kh + ky) * kw + kx) * oh * ow;
        for (Index oy = 0; oy < oh; ++oy) {
          const Index iy = oy * stride - pad + ky;
          double* dst = row + oy * ow;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + ow, 0.0);
            continue;
          }
          const double* src = img + (ic * h + iy) * w;
          for (Index ox = 0; ox < ow; ++ox) {
            const Index ix = ox * stride - pad + kx;
            dst[ox] = (ix >= 0 && ix < w) ? src[ix] : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const double* col, Index c, Index h, Index w, Index kh, Index kw, Index stride,
            Index pad, Index oh, Index ow, double* img) {
  for (Index ic = 0; ic < c; ++ic) {
    for (Index ky = 0; ky < kh; ++ky) {
      for (Index kx = 0; kx < kw; ++kx) {
        const double* row = col + ((ic * kh + ky) * kw + kx) * oh * ow;
        for (Index oy = 0; oy < oh; ++oy) {
          const Index iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) continue;
          double* dst = img + (ic * h + iy) * w;
          const double* src = row + oy * ow;
          for (Index ox = 0; ox < ow; ++ox) {
            const Index ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

struct AxisSample {
  Index i0 = 0;
  Index i1 = 0;
  double t = 0.0;
  bool differentiable = false;  // false when clamped or the axis has one pixel
};

AxisSample sample_axis(double p, Index size) {
  AxisSample s;
  if (size <= 1) return s;
  const double hi = static_cast<double>(size - 1);
  const double c = std::clamp(p, 0.0, hi);
  s.differentiable = p >= 0.0 && p <= hi;
  s.i0 = std::min<Index>(static_cast<Index>(std::floor(c)), size - 2);
  s.i1 = s.i0 + 1;
  s.t = c - static_cast<double>(s.i0);
  return s;
}

// Source index pair and weight for align_corners=false upsampling.
AxisSample upsample_axis(Index dst, int factor, Index in_size) {
  AxisSample s;
  double src = (static_cast<double>(dst) + 0.5) / factor - 0.5;
  if (src < 0.0) src = 0.0;
  s.i0 = std::min<Index>(static_cast<Index>(std::floor(src)), in_size - 1);
  s.i1 = std::min<Index>(s.i0 + 1, in_size - 1);
  s.t = src - static_cast<double>(s.i0);
  return s;
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              int padding) {
  const Shape is = input.shape();
  const Shape ws = weight.shape();
  if (stride < 1 || padding < 0) throw DimensionError("conv2d: invalid stride/padding");
  if (ws.c != is.c) {
    throw DimensionError("conv2d: weight expects " + std::to_string(ws.c) +
                         " input channels, input has " + std::to_string(is.c));
  }
  if (bias.numel() != ws.n) {
    throw DimensionError("conv2d: bias has " + std::to_string(bias.numel()) +
                         " values for " + std::to_string(ws.n) + " output channels");
  }
  const Index oh_num = is.h + 2 * padding - ws.h;
  const Index ow_num = is.w + 2 * padding - ws.w;
  if (oh_num < 0 || ow_num < 0) {
    throw DimensionError("conv2d: kernel " + ws.str() + " larger than padded input " + is.str());
  }
  const Index oh = oh_num / stride + 1;
  const Index ow = ow_num / stride + 1;
  const Index k = ws.c * ws.h * ws.w;
  const Index p = oh * ow;
  const Shape os{is.n, ws.n, oh, ow};

  std::vector<double> out(sz(os.numel()));
  ConstMap wmat(weight.data().data(), ws.n, k);
  const auto bvals = bias.data();
  const double* in = input.data().data();
#pragma omp parallel for schedule(static) if (is.n > 1)
  for (Index n = 0; n < is.n; ++n) {
    std::vector<double> col(sz(k * p));
    im2col(in + n * is.c * is.plane(), is.c, is.h, is.w, ws.h, ws.w, stride, padding, oh, ow,
           col.data());
    MutMap omat(out.data() + n * ws.n * p, ws.n, p);
    omat.noalias() = wmat * ConstMap(col.data(), k, p);
    for (Index oc = 0; oc < ws.n; ++oc) omat.row(oc).array() += bvals[sz(oc)];
  }

  return detail::make_result(
      os, std::move(out), {input, weight, bias},
      [is, ws, os, stride, padding, k, p](Node& self) {
        double* gin = parent_grad(self, 0);
        double* gw = parent_grad(self, 1);
        double* gb = parent_grad(self, 2);
        const double* in = self.parents[0]->data.data();
        ConstMap wmat(self.parents[1]->data.data(), ws.n, k);
        if (gb) {
          for (Index n = 0; n < is.n; ++n) {
            ConstMap gout(self.grad.data() + n * ws.n * p, ws.n, p);
            for (Index oc = 0; oc < ws.n; ++oc) gb[oc] += gout.row(oc).sum();
          }
        }
        // Per-sample weight gradients are reduced afterwards in sample order,
        // so the result does not depend on the thread count.
        std::vector<double> gw_parts(gw ? sz(is.n * ws.n * k) : 0);
#pragma omp parallel for schedule(static) if (is.n > 1)
        for (Index n = 0; n < is.n; ++n) {
          ConstMap gout(self.grad.data() + n * ws.n * p, ws.n, p);
          std::vector<double> col(sz(k * p));
          if (gw) {
            im2col(in + n * is.c * is.plane(), is.c, is.h, is.w, ws.h, ws.w, stride, padding,
                   os.h, os.w, col.data());
            MutMap(gw_parts.data() + n * ws.n * k, ws.n, k).noalias() =
                gout * ConstMap(col.data(), k, p).transpose();
          }
          if (gin) {
            MutMap(col.data(), k, p).noalias() = wmat.transpose() * gout;
            col2im(col.data(), is.c, is.h, is.w, ws.h, ws.w, stride, padding, os.h, os.w,
                   gin + n * is.c * is.plane());
          }
        }
        if (gw) {
          for (Index n = 0; n < is.n; ++n) {
            const double* part = gw_parts.data() + n * ws.n * k;
            for (Index i = 0; i < ws.n * k; ++i) gw[i] += part[i];
          }
        }
      },
      "conv2d");
}

Tensor grid_sample_bilinear(const Tensor& input, const Tensor& positions) {
  const Shape is = input.shape();
  const Shape ps = positions.shape();
  if (is.c != 1) throw DimensionError("grid_sample_bilinear: input must have one channel");
  if (ps.c % 2 != 0) {
    throw DimensionError("grid_sample_bilinear: positions need an even channel count, got " +
                         std::to_string(ps.c));
  }
  if (ps.n != is.n) throw DimensionError("grid_sample_bilinear: batch mismatch");
  const Index m = ps.c / 2;
  const Index plane = ps.plane();
  const Shape os{is.n, m, ps.h, ps.w};
  std::vector<double> out(sz(os.numel()));
  const double* img = input.data().data();
  const double* pos = positions.data().data();
  for (Index n = 0; n < is.n; ++n) {
    const double* im = img + n * is.plane();
    for (Index j = 0; j < m; ++j) {
      const double* py = pos + (n * ps.c + 2 * j) * plane;
      const double* px = py + plane;
      double* o = out.data() + (n * m + j) * plane;
      for (Index i = 0; i < plane; ++i) {
        const AxisSample ay = sample_axis(py[i], is.h);
        const AxisSample ax = sample_axis(px[i], is.w);
        const double v00 = im[ay.i0 * is.w + ax.i0];
        const double v01 = im[ay.i0 * is.w + ax.i1];
        const double v10 = im[ay.i1 * is.w + ax.i0];
        const double v11 = im[ay.i1 * is.w + ax.i1];
        o[i] = (1.0 - ay.t) * ((1.0 - ax.t) * v00 + ax.t * v01) +
               ay.t * ((1.0 - ax.t) * v10 + ax.t * v11);
      }
    }
  }
  return detail::make_result(
      os, std::move(out), {input, positions},
      [is, ps, m, plane](Node& self) {
        double* gin = parent_grad(self, 0);
        double* gpos = parent_grad(self, 1);
        const double* img = self.parents[0]->data.data();
        const double* pos = self.parents[1]->data.data();
        for (Index n = 0; n < is.n; ++n) {
          const double* im = img + n * is.plane();
          for (Index j = 0; j < m; ++j) {
            const Index ybase = (n * ps.c + 2 * j) * plane;
            const double* py = pos + ybase;
            const double* px = py + plane;
            const double* g = self.grad.data() + (n * m + j) * plane;
            for (Index i = 0; i < plane; ++i) {
              if (g[i] == 0.0) continue;
              const AxisSample ay = sample_axis(py[i], is.h);
              const AxisSample ax = sample_axis(px[i], is.w);
              if (gin) {
                double* gi = gin + n * is.plane();
                gi[ay.i0 * is.w + ax.i0] += g[i] * (1.0 - ay.t) * (1.0 - ax.t);
                gi[ay.i0 * is.w + ax.i1] += g[i] * (1.0 - ay.t) * ax.t;
                gi[ay.i1 * is.w + ax.i0] += g[i] * ay.t * (1.0 - ax.t);
                gi[ay.i1 * is.w + ax.i1] += g[i] * ay.t * ax.t;
              }
              if (gpos) {
                const double v00 = im[ay.i0 * is.w + ax.i0];
                const double v01 = im[ay.i0 * is.w + ax.i1];
                const double v10 = im[ay.i1 * is.w + ax.i0];
                const double v11 = im[ay.i1 * is.w + ax.i1];
                if (ay.differentiable) {
                  gpos[ybase + i] +=
                      g[i] * ((1.0 - ax.t) * (v10 - v00) + ax.t * (v11 - v01));
                }
                if (ax.differentiable) {
                  gpos[ybase + plane + i] +=
                      g[i] * ((1.0 - ay.t) * (v01 - v00) + ay.t * (v11 - v10));
                }
              }
            }
          }
        }
      },
      "grid_sample_bilinear");
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); }, "sigmoid");
}

Tensor leaky_relu(const Tensor& x, double slope) {
  return unary(
      x, [slope](double v) { return v >= 0.0 ? v : slope * v; },
      [slope](double v, double) { return v >= 0.0 ? 1.0 : slope; }, "leaky_relu");
}

Tensor abs(const Tensor& x) {
  return unary(
      x, [](double v) { return std::fabs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }, "abs");
}

Tensor square(const Tensor& x) {
  return unary(
      x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; }, "square");
}

Tensor scale(const Tensor& x, double factor) {
  return unary(
      x, [factor](double v) { return v * factor; },
      [factor](double, double) { return factor; }, "scale");
}

Tensor mean_subtract_channels(const Tensor& x) {
  const Shape s = x.shape();
  if (s.c < 1) throw DimensionError("mean_subtract_channels: no channels");
  const Index plane = s.plane();
  const auto in = x.data();
  std::vector<double> out(in.size());
  std::vector<double> mean(sz(plane));
  for (Index n = 0; n < s.n; ++n) {
    const double* src = in.data() + n * s.c * plane;
    double* dst = out.data() + n * s.c * plane;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (Index c = 0; c < s.c; ++c) {
      for (Index i = 0; i < plane; ++i) mean[sz(i)] += src[c * plane + i];
    }
    for (double& v : mean) v /= static_cast<double>(s.c);
    for (Index c = 0; c < s.c; ++c) {
      for (Index i = 0; i < plane; ++i) dst[c * plane + i] = src[c * plane + i] - mean[sz(i)];
    }
  }
  return detail::make_result(
      s, std::move(out), {x},
      [s, plane](Node& self) {
        double* gx = parent_grad(self, 0);
        if (!gx) return;
        std::vector<double> mean(sz(plane));
        for (Index n = 0; n < s.n; ++n) {
          const double* g = self.grad.data() + n * s.c * plane;
          std::fill(mean.begin(), mean.end(), 0.0);
          for (Index c = 0; c < s.c; ++c) {
            for (Index i = 0; i < plane; ++i) mean[sz(i)] += g[c * plane + i];
          }
          for (double& v : mean) v /= static_cast<double>(s.c);
          double* dst = gx + n * s.c * plane;
          for (Index c = 0; c < s.c; ++c) {
            for (Index i = 0; i < plane; ++i) dst[c * plane + i] += g[c * plane + i] - mean[sz(i)];
          }
        }
      },
      "mean_subtract_channels");
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  const auto x = a.data();
  const auto y = b.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return detail::make_result(
      a.shape(), std::move(out), {a, b},
      [](Node& self) {
        for (std::size_t k = 0; k < 2; ++k) {
          if (double* g = parent_grad(self, k)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
          }
        }
      },
      "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  const auto x = a.data();
  const auto y = b.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return detail::make_result(
      a.shape(), std::move(out), {a, b},
      [](Node& self) {
        if (double* g = parent_grad(self, 0)) {
          for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
        }
        if (double* g = parent_grad(self, 1)) {
          for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
        }
      },
      "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  const auto x = a.data();
  const auto y = b.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  return detail::make_result(
      a.shape(), std::move(out), {a, b},
      [](Node& self) {
        const auto& x = self.parents[0]->data;
        const auto& y = self.parents[1]->data;
        if (double* g = parent_grad(self, 0)) {
          for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * y[i];
        }
        if (double* g = parent_grad(self, 1)) {
          for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * x[i];
        }
      },
      "mul");
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return detail::make_result(
      {1, 1, 1, 1}, {total}, {x},
      [](Node& self) {
        if (double* g = parent_grad(self, 0)) {
          const double up = self.grad[0];
          const std::size_t count = self.parents[0]->data.size();
          for (std::size_t i = 0; i < count; ++i) g[i] += up;
        }
      },
      "sum");
}

Tensor sum_channels(const Tensor& x) {
  const Shape s = x.shape();
  const Index plane = s.plane();
  const Shape os{s.n, 1, s.h, s.w};
  std::vector<double> out(sz(os.numel()), 0.0);
  const auto in = x.data();
  for (Index n = 0; n < s.n; ++n) {
    for (Index c = 0; c < s.c; ++c) {
      const double* src = in.data() + (n * s.c + c) * plane;
      double* dst = out.data() + n * plane;
      for (Index i = 0; i < plane; ++i) dst[i] += src[i];
    }
  }
  return detail::make_result(
      os, std::move(out), {x},
      [s, plane](Node& self) {
        double* gx = parent_grad(self, 0);
        if (!gx) return;
        for (Index n = 0; n < s.n; ++n) {
          const double* g = self.grad.data() + n * plane;
          for (Index c = 0; c < s.c; ++c) {
            double* dst = gx + (n * s.c + c) * plane;
            for (Index i = 0; i < plane; ++i) dst[i] += g[i];
          }
        }
      },
      "sum_channels");
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w) {
    throw DimensionError("concat_channels: extents differ " + sa.str() + " vs " + sb.str());
  }
  const Index plane = sa.plane();
  const Shape os{sa.n, sa.c + sb.c, sa.h, sa.w};
  std::vector<double> out(sz(os.numel()));
  for (Index n = 0; n < sa.n; ++n) {
    std::copy_n(a.data().data() + n * sa.c * plane, sa.c * plane,
                out.data() + n * os.c * plane);
    std::copy_n(b.data().data() + n * sb.c * plane, sb.c * plane,
                out.data() + (n * os.c + sa.c) * plane);
  }
  return detail::make_result(
      os, std::move(out), {a, b},
      [sa, sb, os, plane](Node& self) {
        double* ga = parent_grad(self, 0);
        double* gb = parent_grad(self, 1);
        for (Index n = 0; n < sa.n; ++n) {
          const double* g = self.grad.data() + n * os.c * plane;
          if (ga) {
            double* dst = ga + n * sa.c * plane;
            for (Index i = 0; i < sa.c * plane; ++i) dst[i] += g[i];
          }
          if (gb) {
            double* dst = gb + n * sb.c * plane;
            for (Index i = 0; i < sb.c * plane; ++i) dst[i] += g[sa.c * plane + i];
          }
        }
      },
      "concat_channels");
}

Tensor slice_channels(const Tensor& x, std::int64_t begin, std::int64_t count) {
  const Shape s = x.shape();
  if (begin < 0 || count < 0 || begin + count > s.c) {
    throw DimensionError("slice_channels: range [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") outside " + s.str());
  }
  const Index plane = s.plane();
  const Shape os{s.n, count, s.h, s.w};
  std::vector<double> out(sz(os.numel()));
  for (Index n = 0; n < s.n; ++n) {
    std::copy_n(x.data().data() + (n * s.c + begin) * plane, count * plane,
                out.data() + n * count * plane);
  }
  return detail::make_result(
      os, std::move(out), {x},
      [s, begin, count, plane](Node& self) {
        double* gx = parent_grad(self, 0);
        if (!gx) return;
        for (Index n = 0; n < s.n; ++n) {
          const double* g = self.grad.data() + n * count * plane;
          double* dst = gx + (n * s.c + begin) * plane;
          for (Index i = 0; i < count * plane; ++i) dst[i] += g[i];
        }
      },
      "slice_channels");
}

Tensor insert_zero_channels(const Tensor& x, std::int64_t at, std::int64_t count) {
  const Shape s = x.shape();
  if (at < 0 || at > s.c || count < 0) {
    throw DimensionError("insert_zero_channels: index " + std::to_string(at) + " outside " +
                         s.str());
  }
  const Index plane = s.plane();
  const Shape os{s.n, s.c + count, s.h, s.w};
  std::vector<double> out(sz(os.numel()), 0.0);
  for (Index n = 0; n < s.n; ++n) {
    const double* src = x.data().data() + n * s.c * plane;
    double* dst = out.data() + n * os.c * plane;
    std::copy_n(src, at * plane, dst);
    std::copy_n(src + at * plane, (s.c - at) * plane, dst + (at + count) * plane);
  }
  return detail::make_result(
      os, std::move(out), {x},
      [s, os, at, count, plane](Node& self) {
        double* gx = parent_grad(self, 0);
        if (!gx) return;
        for (Index n = 0; n < s.n; ++n) {
          const double* g = self.grad.data() + n * os.c * plane;
          double* dst = gx + n * s.c * plane;
          for (Index i = 0; i < at * plane; ++i) dst[i] += g[i];
          for (Index i = 0; i < (s.c - at) * plane; ++i) {
            dst[at * plane + i] += g[(at + count) * plane + i];
          }
        }
      },
      "insert_zero_channels");
}

Tensor upsample_bilinear(const Tensor& x, int factor) {
  if (factor < 1) throw DimensionError("upsample_bilinear: factor must be >= 1");
  if (factor == 1) return x;
  const Shape s = x.shape();
  const Shape os{s.n, s.c, s.h * factor, s.w * factor};
  std::vector<AxisSample> ys(sz(os.h));
  std::vector<AxisSample> xs(sz(os.w));
  for (Index i = 0; i < os.h; ++i) ys[sz(i)] = upsample_axis(i, factor, s.h);
  for (Index i = 0; i < os.w; ++i) xs[sz(i)] = upsample_axis(i, factor, s.w);
  std::vector<double> out(sz(os.numel()));
  const auto in = x.data();
  for (Index nc = 0; nc < s.n * s.c; ++nc) {
    const double* src = in.data() + nc * s.plane();
    double* dst = out.data() + nc * os.plane();
    for (Index oy = 0; oy < os.h; ++oy) {
      const AxisSample& ay = ys[sz(oy)];
      const double* r0 = src + ay.i0 * s.w;
      const double* r1 = src + ay.i1 * s.w;
      for (Index ox = 0; ox < os.w; ++ox) {
        const AxisSample& ax = xs[sz(ox)];
        dst[oy * os.w + ox] = (1.0 - ay.t) * ((1.0 - ax.t) * r0[ax.i0] + ax.t * r0[ax.i1]) +
                              ay.t * ((1.0 - ax.t) * r1[ax.i0] + ax.t * r1[ax.i1]);
      }
    }
  }
  return detail::make_result(
      os, std::move(out), {x},
      [s, os, ys = std::move(ys), xs = std::move(xs)](Node& self) {
        double* gx = parent_grad(self, 0);
        if (!gx) return;
        for (Index nc = 0; nc < s.n * s.c; ++nc) {
          const double* g = self.grad.data() + nc * os.plane();
          double* dst = gx + nc * s.plane();
          for (Index oy = 0; oy < os.h; ++oy) {
            const AxisSample& ay = ys[sz(oy)];
            double* r0 = dst + ay.i0 * s.w;
            double* r1 = dst + ay.i1 * s.w;
            for (Index ox = 0; ox < os.w; ++ox) {
              const AxisSample& ax = xs[sz(ox)];
              const double v = g[oy * os.w + ox];
              r0[ax.i0] += v * (1.0 - ay.t) * (1.0 - ax.t);
              r0[ax.i1] += v * (1.0 - ay.t) * ax.t;
              r1[ax.i0] += v * ay.t * (1.0 - ax.t);
              r1[ax.i1] += v * ay.t * ax.t;
            }
          }
        }
      },
      "upsample_bilinear");
}

Tensor crop_spatial(const Tensor& x, std::int64_t h, std::int64_t w) {
  const Shape s = x.shape();
  if (h < 0 || w < 0 || h > s.h || w > s.w) {
    throw DimensionError("crop_spatial: window " + std::to_string(h) + "x" + std::to_string(w) +
                         " exceeds " + s.str());
  }
  if (h == s.h && w == s.w) return x;
  const Shape os{s.n, s.c, h, w};
  std::vector<double> out(sz(os.numel()));
  for (Index nc = 0; nc < s.n * s.c; ++nc) {
    for (Index y = 0; y < h; ++y) {
      std::copy_n(x.data().data() + nc * s.plane() + y * s.w, w,
                  out.data() + nc * os.plane() + y * w);
    }
  }
  return detail::make_result(
      os, std::move(out), {x},
      [s, os](Node& self) {
        double* gx = parent_grad(self, 0);
        if (!gx) return;
        for (Index nc = 0; nc < s.n * s.c; ++nc) {
          for (Index y = 0; y < os.h; ++y) {
            const double* g = self.grad.data() + nc * os.plane() + y * os.w;
            double* dst = gx + nc * s.plane() + y * s.w;
            for (Index i = 0; i < os.w; ++i) dst[i] += g[i];
          }
        }
      },
      "crop_spatial");
}

Tensor flip_horizontal(const Tensor& x) {
  const Shape s = x.shape();
  std::vector<double> out(sz(s.numel()));
  const auto in = x.data();
  for (Index row = 0; row < s.n * s.c * s.h; ++row) {
    const double* src = in.data() + row * s.w;
    double* dst = out.data() + row * s.w;
    for (Index i = 0; i < s.w; ++i) dst[i] = src[s.w - 1 - i];
  }
  return detail::make_result(
      s, std::move(out), {x},
      [s](Node& self) {
        double* gx = parent_grad(self, 0);
        if (!gx) return;
        for (Index row = 0; row < s.n * s.c * s.h; ++row) {
          for (Index i = 0; i < s.w; ++i) gx[row * s.w + i] += self.grad[sz(row * s.w + s.w - 1 - i)];
        }
      },
      "flip_horizontal");
}

}  // namespace lrru::ops
