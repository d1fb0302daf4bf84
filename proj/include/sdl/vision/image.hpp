#ifndef SDL_VISION_IMAGE_HPP
#define SDL_VISION_IMAGE_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <string>
#include <variant>
#include <vector>

#include "sdl/error.hpp"

namespace sdl::vision {

/// 8-bit single-channel image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
    require(w >= 1 && h >= 1, "GrayImage: dimensions must be >= 1");
    pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
  }

  std::size_t size() const { return pixels.size(); }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const GrayImage&) const = default;
};

/// 8-bit interleaved RGB image.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // r, g, b triples

  bool operator==(const RgbImage&) const = default;
};

/// Luminance with fixed weights 0.299 / 0.587 / 0.114, rounded to nearest.
inline GrayImage to_gray(const RgbImage& rgb) {
  GrayImage g(rgb.width, rgb.height);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    const double l = 0.299 * rgb.pixels[3 * i] + 0.587 * rgb.pixels[3 * i + 1] + 0.114 * rgb.pixels[3 * i + 2];
    g.pixels[i] = static_cast<std::uint8_t>(std::lround(std::min(255.0, l)));
  }
  return g;
}

using AnyImage = std::variant<GrayImage, RgbImage>;

namespace detail {

inline void skip_ws_and_comments(std::istream& in) {
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      in.get();
    } else {
      return;
    }
  }
}

inline int read_header_int(std::istream& in) {
  skip_ws_and_comments(in);
  int v = -1;
  if (!(in >> v)) throw IoError("PNM: malformed header");
  return v;
}

}  // namespace detail

/// Reads binary PGM (P5) or PPM (P6) with maxval 255.
inline AnyImage read_pnm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
    throw IoError("PNM: only binary P5/P6 images are supported");
  const int w = detail::read_header_int(in);
  const int h = detail::read_header_int(in);
  const int maxval = detail::read_header_int(in);
  if (w < 1 || h < 1) throw IoError("PNM: invalid dimensions");
  if (maxval != 255) throw IoError("PNM: only 8-bit images (maxval 255) are supported");
  in.get();  // single whitespace before the raster
  const std::size_t channels = magic[1] == '5' ? 1 : 3;
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) throw IoError("PNM: truncated raster");
  if (channels == 1) {
    GrayImage g;
    g.width = w;
    g.height = h;
    g.pixels = std::move(data);
    return g;
  }
  return RgbImage{w, h, std::move(data)};
}

inline AnyImage read_pnm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path);
  return read_pnm(in);
}

inline void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

inline void write_pgm_file(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image: " + path);
  write_pgm(out, img);
  if (!out) throw IoError("failed writing image: " + path);
}

inline void write_ppm(std::ostream& out, const RgbImage& img) {
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

}  // namespace sdl::vision

#endif
