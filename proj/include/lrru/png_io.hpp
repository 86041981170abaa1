#pragma once

#include <filesystem>

#include "lrru/depth_map.hpp"

namespace lrru {

/// Millimetres per unit of a 16-bit depth PNG (value 256 = 1 m, 0 = invalid).
inline constexpr double kDepthUnitMm = 1000.0 / 256.0;

/// Reads a 16-bit single-channel depth PNG. Other formats raise DataError.
DepthMap read_depth_png(const std::filesystem::path& path);
/// Writes depth rounded to the nearest PNG unit; invalid pixels become 0.
void write_depth_png(const DepthMap& map, const std::filesystem::path& path);

/// Reads an 8-bit RGB (or RGBA, alpha dropped) PNG into [0, 1].
RgbImage read_rgb_png(const std::filesystem::path& path);
/// Writes an 8-bit RGB PNG, rounding each channel to the nearest level.
void write_rgb_png(const RgbImage& image, const std::filesystem::path& path);

/// Quantises a depth value in millimetres to the PNG grid.
double quantize_depth_mm(double depth_mm);

}  // namespace lrru
