#include "lrru/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "lrru/error.hpp"

namespace lrru {

MetricReport metrics(const DepthMap& pred, const DepthMap& gt) {
  if (pred.height != gt.height || pred.width != gt.width) {
    throw DimensionError("metrics: prediction and ground truth extents differ");
  }
  const double t1 = 1.25;
  const double t2 = 1.25 * 1.25;
  const double t3 = 1.25 * 1.25 * 1.25;
  double se = 0.0, ae = 0.0, ise = 0.0, iae = 0.0, rel = 0.0;
  std::int64_t n = 0, d1 = 0, d2 = 0, d3 = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt.valid[i] || !(gt.depth[i] > 0.0)) continue;
    if (!pred.valid[i] || !(pred.depth[i] > 0.0)) {
      throw DataError("metrics: prediction is invalid at a ground-truth pixel");
    }
    const double g = gt.depth[i];
    const double p = pred.depth[i];
    const double err = std::fabs(g - p);
    const double ierr = std::fabs(1e6 / g - 1e6 / p);
    se += err * err;
    ae += err;
    ise += ierr * ierr;
    iae += ierr;
    rel += err / g;
    const double ratio = std::max(g / p, p / g);
    d1 += ratio < t1;
    d2 += ratio < t2;
    d3 += ratio < t3;
    ++n;
  }
  if (n == 0) throw DataError("metrics: ground truth has no valid pixels");
  const double count = static_cast<double>(n);
  MetricReport r;
  r.rmse_mm = std::sqrt(se / count);
  r.mae_mm = ae / count;
  r.irmse_per_km = std::sqrt(ise / count);
  r.imae_per_km = iae / count;
  r.rel = rel / count;
  r.delta1 = 100.0 * static_cast<double>(d1) / count;
  r.delta2 = 100.0 * static_cast<double>(d2) / count;
  r.delta3 = 100.0 * static_cast<double>(d3) / count;
  r.valid_count = n;
  return r;
}

MetricReport average_reports(const std::vector<MetricReport>& reports) {
  if (reports.empty()) throw DataError("average_reports: no reports");
  MetricReport m;
  for (const auto& r : reports) {
    m.rmse_mm += r.rmse_mm;
    m.mae_mm += r.mae_mm;
    m.irmse_per_km += r.irmse_per_km;
    m.imae_per_km += r.imae_per_km;
    m.rel += r.rel;
    m.delta1 += r.delta1;
    m.delta2 += r.delta2;
    m.delta3 += r.delta3;
    m.valid_count += r.valid_count;
  }
  const double k = static_cast<double>(reports.size());
  m.rmse_mm /= k;
  m.mae_mm /= k;
  m.irmse_per_km /= k;
  m.imae_per_km /= k;
  m.rel /= k;
  m.delta1 /= k;
  m.delta2 /= k;
  m.delta3 /= k;
  return m;
}

nlohmann::json to_json(const MetricReport& r) {
  return {{"rmse_mm", r.rmse_mm},         {"mae_mm", r.mae_mm}, {"irmse_per_km", r.irmse_per_km},
          {"imae_per_km", r.imae_per_km}, {"rel", r.rel},       {"delta1", r.delta1},
          {"delta2", r.delta2},           {"delta3", r.delta3}, {"valid_count", r.valid_count}};
}

}  // namespace lrru
