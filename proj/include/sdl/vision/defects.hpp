#ifndef SDL_VISION_DEFECTS_HPP
#define SDL_VISION_DEFECTS_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdl/error.hpp"
#include "sdl/vision/image.hpp"

namespace sdl::vision {

enum class Background { bright, dark };

// Bright background: defects are darker than the film. Dark background:
// scattering defects are brighter.
enum class Polarity { defects_below, defects_above };

inline Polarity polarity_for(Background bg) {
  return bg == Background::bright ? Polarity::defects_below : Polarity::defects_above;
}

inline std::string to_string(Background bg) { return bg == Background::bright ? "bright" : "dark"; }

inline Background background_from_string(const std::string& s) {
  if (s == "bright") return Background::bright;
  if (s == "dark") return Background::dark;
  throw ValidationError("background must be 'bright' or 'dark', got '" + s + "'");
}

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

struct DefectMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> marked;  // 0 or 1

  std::size_t size() const { return marked.size(); }
};

struct DefectReport {
  Background background = Background::bright;
  double defect_fraction = 0.0;  // percent of active area
  std::int64_t defect_pixel_count = 0;
  std::int64_t active_area_pixels = 0;
  int threshold_used = 0;
};

inline void to_json(nlohmann::json& j, const DefectReport& r) {
  j = nlohmann::json{{"background", to_string(r.background)},
                     {"defect_fraction", r.defect_fraction},
                     {"defect_pixel_count", r.defect_pixel_count},
                     {"active_area_pixels", r.active_area_pixels},
                     {"threshold_used", r.threshold_used}};
}

struct DefectAnalysisConfig {
  std::optional<Rect> crop;  // unset: full frame
  int bright_threshold = 140;
  int dark_threshold = 90;
  int median_radius = 0;  // 0 disables the median filter

  int threshold_for(Background bg) const { return bg == Background::bright ? bright_threshold : dark_threshold; }

  void validate() const {
    require(bright_threshold >= 0 && bright_threshold <= 255, "bright threshold must lie in [0, 255]");
    require(dark_threshold >= 0 && dark_threshold <= 255, "dark threshold must lie in [0, 255]");
    require(median_radius >= 0, "median radius must be >= 0");
  }
};

inline GrayImage crop_active_area(const GrayImage& img, const Rect& r) {
  require(r.w >= 1 && r.h >= 1, "crop: rectangle must be non-empty");
  require(r.x >= 0 && r.y >= 0 && r.x + r.w <= img.width && r.y + r.h <= img.height,
          "crop: rectangle exceeds image bounds");
  GrayImage out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    const auto* src = img.pixels.data() + static_cast<std::size_t>(r.y + y) * img.width + r.x;
    std::copy(src, src + r.w, out.pixels.data() + static_cast<std::size_t>(y) * r.w);
  }
  return out;
}

inline DefectMask binarize(const GrayImage& img, int threshold, Polarity polarity) {
  require(threshold >= 0 && threshold <= 255, "binarize: threshold must lie in [0, 255]");
  DefectMask mask{img.width, img.height, std::vector<std::uint8_t>(img.pixels.size())};
  if (polarity == Polarity::defects_below) {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.marked[i] = img.pixels[i] < threshold ? 1 : 0;
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.marked[i] = img.pixels[i] > threshold ? 1 : 0;
  }
  return mask;
}

inline std::int64_t marked_count(const DefectMask& mask) {
  std::int64_t n = 0;
  for (auto v : mask.marked) n += v;
  return n;
}

inline double defect_fraction(const DefectMask& mask) {
  require(!mask.marked.empty(), "defect_fraction: empty mask");
  return 100.0 * static_cast<double>(marked_count(mask)) / static_cast<double>(mask.marked.size());
}

/// Square-window median filter with edge replication.
inline GrayImage median_filter(const GrayImage& img, int radius) {
  if (radius <= 0) return img;
  GrayImage out(img.width, img.height);
  std::vector<std::uint8_t> window;
  window.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      window.clear();
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = std::clamp(y + dy, 0, img.height - 1);
        for (int dx = -radius; dx <= radius; ++dx) window.push_back(img.at(std::clamp(x + dx, 0, img.width - 1), yy));
      }
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out.at(x, y) = *mid;
    }
  }
  return out;
}

/// Crop, optional median filter, fixed-threshold binarization, area fraction.
inline DefectReport analyze_defects(const GrayImage& img, Background bg, const DefectAnalysisConfig& cfg) {
  cfg.validate();
  GrayImage active = cfg.crop ? crop_active_area(img, *cfg.crop) : img;
  if (cfg.median_radius > 0) active = median_filter(active, cfg.median_radius);
  const int threshold = cfg.threshold_for(bg);
  const DefectMask mask = binarize(active, threshold, polarity_for(bg));
  DefectReport r;
  r.background = bg;
  r.defect_pixel_count = marked_count(mask);
  r.active_area_pixels = static_cast<std::int64_t>(mask.size());
  r.defect_fraction = defect_fraction(mask);
  r.threshold_used = threshold;
  return r;
}

inline DefectReport analyze_defects(const AnyImage& img, Background bg, const DefectAnalysisConfig& cfg) {
  if (const auto* g = std::get_if<GrayImage>(&img)) return analyze_defects(*g, bg, cfg);
  return analyze_defects(to_gray(std::get<RgbImage>(img)), bg, cfg);
}

}  // namespace sdl::vision

#endif
