#ifndef SDL_VIRTLAB_NOISE_HPP
#define SDL_VIRTLAB_NOISE_HPP

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "sdl/error.hpp"
#include "sdl/random.hpp"

namespace sdl::virtlab {

/// Heteroscedastic replicate noise: sigma = base + rel * |true value|.
/// Defect noise applies independently to each background channel. Defaults
/// were calibrated on campaign seeds disjoint from those used in testing.
struct NoiseModel {
  double sigma_od_base = 0.0092;
  double sigma_od_rel = 0.0154;
  double sigma_def_base = 0.072;
  double sigma_def_rel = 0.160;

  static NoiseModel zero() { return {0.0, 0.0, 0.0, 0.0}; }

  double sigma_od(double od) const { return sigma_od_base + sigma_od_rel * std::abs(od); }
  double sigma_defect(double d) const { return sigma_def_base + sigma_def_rel * std::abs(d); }

  void validate() const {
    for (double v : {sigma_od_base, sigma_od_rel, sigma_def_base, sigma_def_rel})
      require(std::isfinite(v) && v >= 0.0, "noise constants must be finite and non-negative");
  }
};

inline void to_json(nlohmann::json& j, const NoiseModel& n) {
  j = nlohmann::json{{"sigma_od_base", n.sigma_od_base},
                     {"sigma_od_rel", n.sigma_od_rel},
                     {"sigma_def_base", n.sigma_def_base},
                     {"sigma_def_rel", n.sigma_def_rel}};
}

inline void from_json(const nlohmann::json& j, NoiseModel& n) {
  NoiseModel d;
  n.sigma_od_base = j.value("sigma_od_base", d.sigma_od_base);
  n.sigma_od_rel = j.value("sigma_od_rel", d.sigma_od_rel);
  n.sigma_def_base = j.value("sigma_def_base", d.sigma_def_base);
  n.sigma_def_rel = j.value("sigma_def_rel", d.sigma_def_rel);
  n.validate();
}

/// Gaussian draw truncated to [lo, hi] by rejection; falls back to clamping
/// after many rejections so pathological bounds cannot hang.
inline double truncated_normal(Rng& rng, double mean, double sigma, double lo, double hi) {
  require(lo <= hi, "truncated_normal: empty interval");
  if (sigma <= 0.0) return std::clamp(mean, lo, hi);
  std::normal_distribution<double> n(mean, sigma);
  for (int i = 0; i < 1000; ++i) {
    const double v = n(rng);
    if (v >= lo && v <= hi) return v;
  }
  return std::clamp(mean, lo, hi);
}

}  // namespace sdl::virtlab

#endif
