#include "lrru/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "lrru/error.hpp"

namespace lrru {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct ErrorState {
  char message[256] = "libpng error";
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* state = static_cast<ErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct RawImage {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
  int color_type = 0;
  std::vector<std::uint8_t> bytes;  // rows as stored (16-bit samples big-endian)
};

// Header pass and pixel pass are separate so no C++ object with a destructor
// is created between setjmp and a possible longjmp.
bool read_header(png_structp png, png_infop info, std::FILE* file, RawImage* raw) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  raw->width = static_cast<int>(png_get_image_width(png, info));
  raw->height = static_cast<int>(png_get_image_height(png, info));
  raw->bit_depth = png_get_bit_depth(png, info);
  raw->channels = png_get_channels(png, info);
  raw->color_type = png_get_color_type(png, info);
  return true;
}

bool read_pixels(png_structp png, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

RawImage read_png_raw(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw DataError("cannot open " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw DataError("not a PNG file: " + path.string());
  }
  ErrorState err;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
  png_infop info = png_create_info_struct(png);
  RawImage raw;
  bool ok = read_header(png, info, file.get(), &raw);
  if (ok && raw.color_type == PNG_COLOR_TYPE_PALETTE) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("palette PNGs are not supported: " + path.string());
  }
  if (ok) {
    const std::size_t rowbytes = static_cast<std::size_t>(raw.width) * raw.channels * (raw.bit_depth / 8);
    raw.bytes.resize(rowbytes * static_cast<std::size_t>(raw.height));
    std::vector<png_bytep> rows(static_cast<std::size_t>(raw.height));
    for (int y = 0; y < raw.height; ++y) rows[static_cast<std::size_t>(y)] = raw.bytes.data() + rowbytes * y;
    if (raw.bit_depth < 8) {
      ok = false;
      std::snprintf(err.message, sizeof(err.message), "sub-byte bit depth %d", raw.bit_depth);
    } else {
      ok = read_pixels(png, rows.data());
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw DataError(path.string() + ": " + err.message);
  return raw;
}

bool write_all(png_structp png, png_infop info, std::FILE* file, int width, int height,
               int bit_depth, int color_type, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

void write_png_raw(const std::filesystem::path& path, int width, int height, int bit_depth,
                   int color_type, std::vector<std::uint8_t>& bytes, std::size_t rowbytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = bytes.data() + rowbytes * y;
  ErrorState err;
  bool ok = false;
  {
    FilePtr file(std::fopen(tmp.string().c_str(), "wb"));
    if (!file) throw DataError("cannot write " + tmp.string());
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
    png_infop info = png_create_info_struct(png);
    ok = write_all(png, info, file.get(), width, height, bit_depth, color_type, rows.data());
    png_destroy_write_struct(&png, &info);
  }
  if (!ok) {
    std::filesystem::remove(tmp);
    throw DataError(path.string() + ": " + err.message);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

double quantize_depth_mm(double depth_mm) {
  return std::round(depth_mm / kDepthUnitMm) * kDepthUnitMm;
}

DepthMap read_depth_png(const std::filesystem::path& path) {
  const RawImage raw = read_png_raw(path);
  if (raw.bit_depth != 16 || raw.channels != 1) {
    throw DataError("depth PNG must be 16-bit single-channel: " + path.string() + " has " +
                    std::to_string(raw.channels) + " channel(s) at " +
                    std::to_string(raw.bit_depth) + " bits");
  }
  DepthMap map(raw.height, raw.width);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const unsigned v = (static_cast<unsigned>(raw.bytes[2 * i]) << 8) | raw.bytes[2 * i + 1];
    if (v != 0) {
      map.depth[i] = v * kDepthUnitMm;
      map.valid[i] = 1;
    }
  }
  return map;
}

void write_depth_png(const DepthMap& map, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(map.size() * 2, 0);
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!map.valid[i]) continue;
    const double units = std::round(map.depth[i] / kDepthUnitMm);
    const auto v = static_cast<unsigned>(std::clamp(units, 1.0, 65535.0));
    bytes[2 * i] = static_cast<std::uint8_t>(v >> 8);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
  }
  write_png_raw(path, map.width, map.height, 16, PNG_COLOR_TYPE_GRAY, bytes,
                static_cast<std::size_t>(map.width) * 2);
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  const RawImage raw = read_png_raw(path);
  if (raw.bit_depth != 8 || (raw.channels != 3 && raw.channels != 4)) {
    throw DataError("RGB PNG must be 8-bit RGB or RGBA: " + path.string());
  }
  RgbImage img(raw.height, raw.width);
  const std::size_t n = static_cast<std::size_t>(raw.height) * raw.width;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) img.data[i * 3 + c] = raw.bytes[i * raw.channels + c] / 255.0;
  }
  return img;
}

void write_rgb_png(const RgbImage& image, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(image.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(std::lround(std::clamp(image.data[i], 0.0, 1.0) * 255.0));
  }
  write_png_raw(path, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, bytes,
                static_cast<std::size_t>(image.width) * 3);
}

}  // namespace lrru
