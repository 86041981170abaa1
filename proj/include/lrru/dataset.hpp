#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lrru/depth_map.hpp"

namespace lrru {

/// Zero-padded six-digit file stem, e.g. 7 -> "000007".
std::string sample_stem(std::size_t index);

/// Writes rgb/NNNNNN.png (when present), sparse/NNNNNN.png and gt/NNNNNN.png.
void write_dataset(const std::filesystem::path& dir, const std::vector<DepthSample>& samples);

/// Reads a dataset directory. rgb/ is optional; sparse/ and gt/ must hold
/// matching file names.
std::vector<DepthSample> load_dataset(const std::filesystem::path& dir);

/// Sorted *.png files of a directory.
std::vector<std::filesystem::path> list_pngs(const std::filesystem::path& dir);

}  // namespace lrru
