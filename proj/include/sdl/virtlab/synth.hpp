#ifndef SDL_VIRTLAB_SYNTH_HPP
#define SDL_VIRTLAB_SYNTH_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sdl/error.hpp"
#include "sdl/random.hpp"
#include "sdl/spectra/spectrum.hpp"
#include "sdl/vision/defects.hpp"
#include "sdl/vision/image.hpp"

namespace sdl::virtlab {

struct SpectrumSynthesis {
  double lambda_min = 380.0;
  double lambda_max = 1000.0;
  double step = 1.0;
  double band_center = 712.0;
  double band_width = 60.0;  // standard deviation, nm
  double baseline = 0.05;
  double dark_level = 80.0;
  double read_noise = 2.0;

  void validate() const {
    require(step > 0.0 && lambda_max > lambda_min, "spectrum synthesis: invalid grid");
    require(band_width > 0.0 && baseline >= 0.0, "spectrum synthesis: invalid band");
    require(dark_level >= 0.0 && read_noise >= 0.0, "spectrum synthesis: invalid detector model");
  }

  std::vector<double> grid() const {
    std::vector<double> w;
    const auto n = static_cast<std::size_t>(std::floor((lambda_max - lambda_min) / step + 1e-9)) + 1;
    w.reserve(n);
    for (std::size_t i = 0; i < n; ++i) w.push_back(lambda_min + step * static_cast<double>(i));
    return w;
  }
};

/// Smooth positive lamp profile in counts.
inline double lamp_counts(double lambda_nm) {
  const double z = (lambda_nm - 600.0) / 300.0;
  return 1e6 * (0.1 + 0.9 * std::exp(-z * z));
}

inline double band_absorbance(double lambda_nm, double amplitude, const SpectrumSynthesis& cfg) {
  const double z = (lambda_nm - cfg.band_center) / cfg.band_width;
  return amplitude * std::exp(-0.5 * z * z) + cfg.baseline;
}

/// Builds a raw triple whose transmittance is `t` before detector noise.
inline spectra::RawSpectrum raw_from_transmittance(const std::vector<double>& wavelengths, const std::vector<double>& t,
                                                   std::uint64_t seed, double dark_level = 80.0,
                                                   double read_noise = 2.0) {
  require(wavelengths.size() == t.size(), "raw_from_transmittance: length mismatch");
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  spectra::RawSpectrum raw;
  raw.wavelengths = wavelengths;
  const std::size_t n = wavelengths.size();
  raw.sample_counts.resize(n);
  raw.dark_counts.resize(n);
  raw.reference_counts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dark = dark_level + read_noise * noise(rng);
    const double ref = lamp_counts(wavelengths[i]) + dark;
    raw.dark_counts[i] = dark;
    raw.reference_counts[i] = ref;
    raw.sample_counts[i] = dark + (ref - dark) * t[i] + read_noise * noise(rng);
  }
  return raw;
}

/// Raw spectrum of a film with a Gaussian absorption band of the given
/// amplitude plus the configured flat baseline.
inline spectra::RawSpectrum synthesize_spectrum(double band_amplitude, std::uint64_t seed,
                                                const SpectrumSynthesis& cfg = {}) {
  cfg.validate();
  require(std::isfinite(band_amplitude) && band_amplitude >= 0.0, "synthesize_spectrum: amplitude must be >= 0");
  const auto w = cfg.grid();
  std::vector<double> t(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) t[i] = std::pow(10.0, -band_absorbance(w[i], band_amplitude, cfg));
  return raw_from_transmittance(w, t, seed, cfg.dark_level, cfg.read_noise);
}

struct ImageSynthesis {
  int size = 1024;
  std::uint8_t bright_level = 200;
  std::uint8_t dark_level = 30;
  std::uint8_t defect_on_bright = 40;
  std::uint8_t defect_on_dark = 220;
  double texture_sigma = 3.0;
  double min_radius = 2.0;
  double max_radius = 20.0;
  double max_fraction = 5.0;  // percent

  void validate() const {
    require(size >= 8, "image synthesis: size must be >= 8");
    require(texture_sigma >= 0.0, "image synthesis: texture sigma must be >= 0");
    require(min_radius > 0.0 && max_radius >= min_radius, "image synthesis: invalid radius range");
  }
};

struct SynthesizedImage {
  vision::GrayImage image;
  std::int64_t painted_pixels = 0;  // oracle ledger
  int disks = 0;

  double painted_fraction() const {
    return 100.0 * static_cast<double>(painted_pixels) / static_cast<double>(image.size());
  }
};

namespace detail {

// 2^16 entries whose empirical distribution is the rounded N(0, sigma).
inline std::vector<std::int8_t> texture_table(double sigma) {
  constexpr int kSize = 1 << 16;
  std::vector<std::int8_t> table;
  table.reserve(kSize);
  if (sigma <= 0.0) return std::vector<std::int8_t>(kSize, 0);
  const int kmax = std::min(127, static_cast<int>(std::ceil(6.0 * sigma)));
  auto cdf = [&](double x) { return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0))); };
  double acc = 0.0;
  for (int k = -kmax; k <= kmax; ++k) {
    acc += cdf(k + 0.5) - cdf(k - 0.5);
    const auto upto = static_cast<std::size_t>(std::lround(acc / (cdf(kmax + 0.5) - cdf(-kmax - 0.5)) * kSize));
    while (table.size() < std::min<std::size_t>(upto, kSize)) table.push_back(static_cast<std::int8_t>(k));
  }
  while (table.size() < kSize) table.push_back(static_cast<std::int8_t>(kmax));
  return table;
}

inline std::uint8_t saturate(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

}  // namespace detail

/// Defect image: textured uniform background plus random disks until the
/// number of painted pixels equals round(fraction * area). The last disks
/// shrink so the painted count never overshoots.
inline SynthesizedImage synthesize_image(double defect_fraction, vision::Background background, std::uint64_t seed,
                                         const ImageSynthesis& cfg = {}) {
  cfg.validate();
  require(std::isfinite(defect_fraction) && defect_fraction >= 0.0 && defect_fraction <= cfg.max_fraction,
          "synthesize_image: defect fraction must lie in [0, 5] percent");
  const bool bright = background == vision::Background::bright;
  const int n = cfg.size;
  const std::uint8_t base = bright ? cfg.bright_level : cfg.dark_level;
  const std::uint8_t ink = bright ? cfg.defect_on_bright : cfg.defect_on_dark;

  static thread_local double cached_sigma = -1.0;
  static thread_local std::vector<std::int8_t> table;
  if (cached_sigma != cfg.texture_sigma) {
    table = detail::texture_table(cfg.texture_sigma);
    cached_sigma = cfg.texture_sigma;
  }

  SynthesizedImage out;
  out.image = vision::GrayImage(n, n, base);
  std::vector<std::uint8_t> painted(out.image.size(), 0);

  const auto area = static_cast<std::int64_t>(out.image.size());
  const auto target = static_cast<std::int64_t>(std::llround(defect_fraction / 100.0 * static_cast<double>(area)));
  Rng rng(derive_seed(seed, "disks"));
  std::uniform_int_distribution<int> coord(0, n - 1);
  std::uniform_real_distribution<double> log_r(std::log(cfg.min_radius), std::log(cfg.max_radius));

  auto fresh_count = [&](int cx, int cy, double r) {
    const int ri = static_cast<int>(std::floor(r));
    const double r2 = r * r;
    std::int64_t c = 0;
    for (int dy = -ri; dy <= ri; ++dy) {
      const int y = cy + dy;
      if (y < 0 || y >= n) continue;
      for (int dx = -ri; dx <= ri; ++dx) {
        const int x = cx + dx;
        if (x < 0 || x >= n || dx * dx + dy * dy > r2) continue;
        c += painted[static_cast<std::size_t>(y) * n + x] == 0;
      }
    }
    return c;
  };

  while (out.painted_pixels < target) {
    const int cx = coord(rng);
    const int cy = coord(rng);
    double r = std::exp(log_r(rng));
    const std::int64_t remaining = target - out.painted_pixels;
    std::int64_t fresh = fresh_count(cx, cy, r);
    while (fresh > remaining && r > 0.0) {
      r = r >= 1.0 ? r - 0.5 : 0.0;
      fresh = fresh_count(cx, cy, r);
    }
    if (fresh == 0 || fresh > remaining) continue;
    const int ri = static_cast<int>(std::floor(r));
    for (int dy = -ri; dy <= ri; ++dy) {
      const int y = cy + dy;
      if (y < 0 || y >= n) continue;
      for (int dx = -ri; dx <= ri; ++dx) {
        const int x = cx + dx;
        if (x < 0 || x >= n || dx * dx + dy * dy > r * r) continue;
        painted[static_cast<std::size_t>(y) * n + x] = 1;
      }
    }
    out.painted_pixels += fresh;
    ++out.disks;
  }

  Xoshiro256 gen(derive_seed(seed, "texture"));
  auto& px = out.image.pixels;
  std::size_t i = 0;
  while (i < px.size()) {
    std::uint64_t bits = gen();
    for (int k = 0; k < 4 && i < px.size(); ++k, ++i) {
      const int level = painted[i] ? ink : base;
      px[i] = detail::saturate(level + table[bits & 0xffff]);
      bits >>= 16;
    }
  }
  return out;
}

}  // namespace sdl::virtlab

#endif
