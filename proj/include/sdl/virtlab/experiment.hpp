#ifndef SDL_VIRTLAB_EXPERIMENT_HPP
#define SDL_VIRTLAB_EXPERIMENT_HPP

#include <algorithm>
#include <memory>
#include <random>

#include <json.hpp>

#include "sdl/domain.hpp"
#include "sdl/random.hpp"
#include "sdl/virtlab/ground_truth.hpp"
#include "sdl/virtlab/noise.hpp"
#include "sdl/virtlab/synth.hpp"

namespace sdl::virtlab {

struct AmbientRange {
  double temperature_center = 22.0;
  double temperature_spread = 2.0;
  double humidity_center = 45.0;
  double humidity_spread = 10.0;
};

struct ExperimentOutput {
  spectra::RawSpectrum spectrum;
  vision::GrayImage bright;
  vision::GrayImage dark;
  Ambient ambient;
  ObjectiveVector truth;   // noiseless ground truth
  ObjectiveVector target;  // noisy realization the raw data encode
};

struct LabConfig {
  NoiseModel noise;
  SpectrumSynthesis spectrum;
  ImageSynthesis image;
  AmbientRange ambient;
};

class VirtualLab {
public:
  explicit VirtualLab(LabConfig cfg = {}, std::shared_ptr<const GroundTruth> truth = nullptr)
      : cfg_(std::move(cfg)), truth_(truth ? std::move(truth) : std::make_shared<CalibratedGroundTruth>()) {
    cfg_.noise.validate();
    cfg_.spectrum.validate();
    cfg_.image.validate();
  }

  const LabConfig& config() const { return cfg_; }
  const GroundTruth& truth() const { return *truth_; }

  /// Draws noisy objective values and synthesizes the raw measurements that
  /// encode them. Deterministic per seed.
  ExperimentOutput run(const ParameterSet& p, std::uint64_t seed) const {
    ExperimentOutput out;
    out.truth = truth_->evaluate(p);
    const NoiseModel& nm = cfg_.noise;

    Rng od_rng(derive_seed(seed, "od"));
    const double s_od = nm.sigma_od(out.truth.optical_density);
    out.target.optical_density =
        truncated_normal(od_rng, out.truth.optical_density, s_od, 0.0, truth_->od_ceiling() + 3.0 * s_od);

    Rng bright_rng(derive_seed(seed, "defect_bright"));
    Rng dark_rng(derive_seed(seed, "defect_dark"));
    const double dmax = cfg_.image.max_fraction;
    out.target.defect_bright = truncated_normal(bright_rng, out.truth.defect_bright,
                                                nm.sigma_defect(out.truth.defect_bright), 0.0, dmax);
    out.target.defect_dark =
        truncated_normal(dark_rng, out.truth.defect_dark, nm.sigma_defect(out.truth.defect_dark), 0.0, dmax);

    // Split the target OD into band and baseline so the peak absorbance in
    // the analysis window equals the target.
    SpectrumSynthesis sc = cfg_.spectrum;
    const double od = out.target.optical_density;
    const double baseline = std::min(sc.baseline, od);
    sc.baseline = baseline;
    out.spectrum = synthesize_spectrum(od - baseline, derive_seed(seed, "spectrum"), sc);

    out.bright = synthesize_image(out.target.defect_bright, vision::Background::bright, derive_seed(seed, "bright"),
                                  cfg_.image)
                     .image;
    out.dark =
        synthesize_image(out.target.defect_dark, vision::Background::dark, derive_seed(seed, "dark"), cfg_.image)
            .image;

    Rng amb(derive_seed(seed, "ambient"));
    const AmbientRange& ar = cfg_.ambient;
    std::uniform_real_distribution<double> temp(ar.temperature_center - ar.temperature_spread,
                                                ar.temperature_center + ar.temperature_spread);
    std::uniform_real_distribution<double> hum(ar.humidity_center - ar.humidity_spread,
                                               ar.humidity_center + ar.humidity_spread);
    out.ambient.temperature = temp(amb);
    out.ambient.humidity = hum(amb);
    return out;
  }

private:
  LabConfig cfg_;
  std::shared_ptr<const GroundTruth> truth_;
};

inline ExperimentOutput run_experiment(const ParameterSet& p, const NoiseModel& noise, std::uint64_t seed) {
  LabConfig cfg;
  cfg.noise = noise;
  return VirtualLab(cfg).run(p, seed);
}

}  // namespace sdl::virtlab

#endif
