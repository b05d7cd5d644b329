#include "navcam/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "navcam/errors.hpp"

namespace navcam {

namespace {

bool is_ppm_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

struct Cursor {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  std::uint8_t peek() const { return bytes[pos]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("ppm: " + what + " at byte " + std::to_string(pos), pos);
  }

  // Skips whitespace and '#' comments (comment runs to end of line).
  void skip_space_and_comments() {
    while (!eof()) {
      if (is_ppm_space(peek())) {
        ++pos;
      } else if (peek() == '#') {
        while (!eof() && peek() != '\n') ++pos;
      } else {
        return;
      }
    }
  }

  int read_int(const char* what) {
    skip_space_and_comments();
    if (eof()) fail(std::string("unexpected end of data reading ") + what);
    if (peek() < '0' || peek() > '9')
      fail(std::string("expected digit for ") + what);
    long value = 0;
    while (!eof() && peek() >= '0' && peek() <= '9') {
      value = value * 10 + (peek() - '0');
      if (value > 1000000000L) fail(std::string(what) + " out of range");
      ++pos;
    }
    return int(value);
  }
};

}  // namespace

ImageRGB read_ppm(std::span<const std::uint8_t> bytes) {
  Cursor cur{bytes};
  if (bytes.size() < 2) cur.fail("truncated magic");
  const char m0 = char(bytes[0]);
  const char m1 = char(bytes[1]);
  if (m0 != 'P' || (m1 != '6' && m1 != '3')) cur.fail("expected P6 or P3 magic");
  const bool binary = m1 == '6';
  cur.pos = 2;

  const int width = cur.read_int("width");
  const int height = cur.read_int("height");
  if (width <= 0 || height <= 0) cur.fail("dimensions must be positive");
  const int maxval = cur.read_int("maxval");
  if (maxval != 255) cur.fail("unsupported maxval (must be 255)");

  ImageRGB img(width, height);
  const std::size_t samples = std::size_t(width) * std::size_t(height) * 3;

  if (binary) {
    if (cur.eof() || !is_ppm_space(cur.peek()))
      cur.fail("expected single whitespace before raster");
    ++cur.pos;
    if (bytes.size() - cur.pos < samples) {
      cur.pos = bytes.size();
      cur.fail("truncated raster");
    }
    std::uint8_t* dst = img.pixels.data()->data();
    std::copy_n(bytes.data() + cur.pos, samples, dst);
  } else {
    std::uint8_t* dst = img.pixels.data()->data();
    for (std::size_t i = 0; i < samples; ++i) {
      const int v = cur.read_int("sample");
      if (v > 255) cur.fail("sample out of range");
      dst[i] = std::uint8_t(v);
    }
  }
  return img;
}

std::vector<std::uint8_t> write_ppm(const ImageRGB& img, PpmFormat format) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != std::size_t(img.width) * std::size_t(img.height))
    throw std::invalid_argument("write_ppm: malformed image");

  std::vector<std::uint8_t> out;
  char header[64];
  const int header_len =
      std::snprintf(header, sizeof header, "%s\n%d %d\n255\n",
                    format == PpmFormat::P6 ? "P6" : "P3", img.width, img.height);
  out.insert(out.end(), header, header + header_len);

  if (format == PpmFormat::P6) {
    const std::uint8_t* src = img.pixels.data()->data();
    out.insert(out.end(), src, src + img.pixels.size() * 3);
  } else {
    char line[16];
    for (const Rgb8& p : img.pixels) {
      const int n = std::snprintf(line, sizeof line, "%d %d %d\n", p[0], p[1], p[2]);
      out.insert(out.end(), line, line + n);
    }
  }
  return out;
}

ImageRGB read_ppm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("ppm: cannot open " + path, 0);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_ppm(bytes);
}

void write_ppm_file(const ImageRGB& img, const std::string& path, PpmFormat format) {
  const std::vector<std::uint8_t> bytes = write_ppm(img, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

Histogram histogram(const ImageRGB& img, Channel channel) {
  Histogram h;
  h.channel = channel;
  const int c = int(channel);
  for (const Rgb8& p : img.pixels) ++h.bins[p[std::size_t(c)]];
  return h;
}

ImageRGB scale_illumination(const ImageRGB& img, double factor) {
  if (!(factor > 0.0))
    throw std::invalid_argument("scale_illumination: factor must be positive");
  // Precomputed per-value map; the transform is per channel value only.
  std::array<std::uint8_t, 256> lut;
  for (int v = 0; v < 256; ++v) {
    const double scaled = std::round(double(v) * factor);
    lut[std::size_t(v)] = std::uint8_t(std::clamp(scaled, 0.0, 255.0));
  }
  ImageRGB out = img;
  for (Rgb8& p : out.pixels) {
    p[0] = lut[p[0]];
    p[1] = lut[p[1]];
    p[2] = lut[p[2]];
  }
  return out;
}

}  // namespace navcam
