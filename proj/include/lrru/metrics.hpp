#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrru/depth_map.hpp"

namespace lrru {

struct MetricReport {
  double rmse_mm = 0.0;
  double mae_mm = 0.0;
  double irmse_per_km = 0.0;
  double imae_per_km = 0.0;
  double rel = 0.0;
  double delta1 = 0.0;  // percent
  double delta2 = 0.0;
  double delta3 = 0.0;
  std::int64_t valid_count = 0;
};

/// Error of a dense prediction over the valid ground-truth pixels. Inverse
/// depth is taken in 1/km (u = 1e6 / d_mm); delta thresholds are strict.
MetricReport metrics(const DepthMap& pred, const DepthMap& gt);

/// Per-image average of several reports (valid_count is summed).
MetricReport average_reports(const std::vector<MetricReport>& reports);

nlohmann::json to_json(const MetricReport& r);

}  // namespace lrru
