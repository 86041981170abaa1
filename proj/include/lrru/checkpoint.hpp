#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "lrru/params.hpp"

namespace lrru {

/// Parameter checkpoint container:
///
///   <JSON header>\n LRRU <little-endian float64 arrays>
///
/// The header lists every tensor's name, shape, dtype and byte offset
/// (relative to the first byte after the magic) plus free-form metadata.
inline constexpr char kCheckpointMagic[4] = {'L', 'R', 'R', 'U'};

struct Checkpoint {
  ModelParams params;
  nlohmann::json metadata;
};

/// Writes atomically (temporary file + rename).
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const nlohmann::json& metadata = nlohmann::json::object());

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lrru
