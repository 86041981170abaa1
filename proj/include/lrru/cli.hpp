#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lrru {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one `lrru` invocation. `args` excludes the program name, e.g.
/// {"eval", "--pred", "p", "--gt", "g", "--report", "r.json"}. Returns the
/// process exit code; JSON results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Rgb8 {
  unsigned char r, g, b;
};
/// Entry `index` (0..255) of the viz colour ramp; 255 is the warm, nearest end.
Rgb8 depth_colormap(int index);

}  // namespace lrru
