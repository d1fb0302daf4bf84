#ifndef SDL_CAMPAIGN_MEASURE_HPP
#define SDL_CAMPAIGN_MEASURE_HPP

#include "sdl/domain.hpp"
#include "sdl/spectra/spectrum.hpp"
#include "sdl/vision/defects.hpp"

namespace sdl::campaign {

/// Turns one sample's raw measurements into objective values.
inline ObjectiveVector analyze_measurement(const spectra::RawSpectrum& spectrum, const vision::GrayImage& bright,
                                           const vision::GrayImage& dark, const vision::DefectAnalysisConfig& cfg) {
  ObjectiveVector o;
  o.optical_density = spectra::optical_density(spectrum);
  o.defect_bright = vision::analyze_defects(bright, vision::Background::bright, cfg).defect_fraction;
  o.defect_dark = vision::analyze_defects(dark, vision::Background::dark, cfg).defect_fraction;
  return o;
}

}  // namespace sdl::campaign

#endif
