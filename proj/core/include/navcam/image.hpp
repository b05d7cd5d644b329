#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace navcam {

using Rgb8 = std::array<std::uint8_t, 3>;

// 8-bit RGB raster, row-major. (u, v) addresses column u of row v; v grows
// downward as in the PPM byte order.
struct ImageRGB {
  int width = 0;
  int height = 0;
  std::vector<Rgb8> pixels;

  ImageRGB() = default;
  ImageRGB(int w, int h, Rgb8 fill = {0, 0, 0})
      : width(w), height(h), pixels(std::size_t(w) * std::size_t(h), fill) {}

  Rgb8& at(int u, int v) { return pixels[std::size_t(v) * width + u]; }
  const Rgb8& at(int u, int v) const { return pixels[std::size_t(v) * width + u]; }
  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }

  bool operator==(const ImageRGB&) const = default;
};

enum class Channel { R = 0, G = 1, B = 2 };

struct Histogram {
  Channel channel = Channel::R;
  std::array<std::uint64_t, 256> bins{};
};

enum class PpmFormat { P6, P3 };

// Parses binary (P6) or ASCII (P3) PPM with maxval 255. '#' comments are
// accepted anywhere in the header. Trailing bytes after the raster are
// ignored. Throws ParseError carrying the offending byte offset.
ImageRGB read_ppm(std::span<const std::uint8_t> bytes);

// Canonical encoding: "P6\n<w> <h>\n255\n" followed by the raw raster, or
// the P3 equivalent with one "r g b" line per pixel. Never emits comments,
// so write -> read -> write is byte-stable.
std::vector<std::uint8_t> write_ppm(const ImageRGB& img, PpmFormat format = PpmFormat::P6);

ImageRGB read_ppm_file(const std::string& path);
void write_ppm_file(const ImageRGB& img, const std::string& path,
                    PpmFormat format = PpmFormat::P6);

Histogram histogram(const ImageRGB& img, Channel channel);

// Per-channel brightness scaling: clamp(round(c * factor), 0, 255) with
// halves rounded away from zero. factor must be positive.
ImageRGB scale_illumination(const ImageRGB& img, double factor);

}  // namespace navcam
