#include "lrru/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lrru/error.hpp"
#include "lrru/io_util.hpp"

namespace lrru {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const nlohmann::json& metadata) {
  nlohmann::json header;
  header["format"] = "lrru-checkpoint";
  header["version"] = 1;
  header["metadata"] = metadata;
  header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& t = params.tensors()[i];
    const Shape s = t.shape();
    const std::uint64_t nbytes = static_cast<std::uint64_t>(t.numel()) * sizeof(double);
    header["tensors"].push_back({{"name", params.names()[i]},
                                 {"shape", {s.n, s.c, s.h, s.w}},
                                 {"dtype", "float64"},
                                 {"offset", offset},
                                 {"nbytes", nbytes}});
    offset += nbytes;
  }
  std::string blob = header.dump();
  blob.push_back('\n');
  blob.append(kCheckpointMagic, 4);
  for (const Tensor& t : params.tensors()) {
    const auto d = t.data();
    blob.append(reinterpret_cast<const char*>(d.data()), d.size_bytes());
  }
  write_file_atomic(path, blob);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string blob = read_file(path);
  const auto nl = blob.find('\n');
  if (nl == std::string::npos || blob.size() < nl + 5 ||
      std::memcmp(blob.data() + nl + 1, kCheckpointMagic, 4) != 0) {
    throw DataError("not an LRRU checkpoint: " + path.string());
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(0, nl));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("corrupt checkpoint header in " + path.string() + ": " + e.what());
  }
  const std::size_t base = nl + 5;
  Checkpoint ck;
  ck.metadata = header.value("metadata", nlohmann::json::object());
  try {
    for (const auto& entry : header.at("tensors")) {
      if (entry.at("dtype") != "float64") throw DataError("unsupported dtype in checkpoint");
      const auto dims = entry.at("shape").get<std::vector<std::int64_t>>();
      if (dims.size() != 4) throw DataError("checkpoint tensor must be 4-D");
      const Shape s{dims[0], dims[1], dims[2], dims[3]};
      const auto offset = entry.at("offset").get<std::uint64_t>();
      const std::uint64_t nbytes = static_cast<std::uint64_t>(s.numel()) * sizeof(double);
      if (base + offset + nbytes > blob.size()) throw DataError("truncated checkpoint");
      std::vector<double> values(static_cast<std::size_t>(s.numel()));
      std::memcpy(values.data(), blob.data() + base + offset, nbytes);
      ck.params.add(entry.at("name").get<std::string>(), Tensor(s, std::move(values)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint header: " + std::string(e.what()));
  }
  return ck;
}

}  // namespace lrru
