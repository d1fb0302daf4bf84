#ifndef SDL_SPECTRA_COLORIMETRY_HPP
#define SDL_SPECTRA_COLORIMETRY_HPP

#include <cmath>

#include <json.hpp>

#include "sdl/spectra/spectrum.hpp"
#include "sdl/spectra/tables.hpp"

namespace sdl::spectra {

struct LabColor {
  double L_star = 0.0;
  double a_star = 0.0;
  double b_star = 0.0;
};

inline void to_json(nlohmann::json& j, const LabColor& c) {
  j = nlohmann::json{{"L_star", c.L_star}, {"a_star", c.a_star}, {"b_star", c.b_star}};
}

struct Tristimulus {
  double X = 0.0;
  double Y = 0.0;
  double Z = 0.0;
};

namespace detail {

inline double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  constexpr double delta3 = delta * delta * delta;
  return t > delta3 ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// T sampled on the 5 nm table grid by nearest covered grid point.
inline std::array<double, 81> sample_on_5nm(const TransmittanceSpectrum& t, const char* what) {
  require(t.wavelengths.size() == t.T.size() && !t.T.empty(), std::string(what) + ": malformed spectrum");
  require_covers(t.wavelengths, tables::kStart, tables::kEnd, tables::kStep5 / 2, what);
  std::array<double, 81> out{};
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = t.T[nearest_index(t.wavelengths, tables::kStart + tables::kStep5 * static_cast<double>(i))];
  return out;
}

}  // namespace detail

/// D65 / 10-degree tristimulus values, rectangle rule on 5 nm, Y = 100 for T = 1.
inline Tristimulus tristimulus(const TransmittanceSpectrum& t) {
  const auto tv = detail::sample_on_5nm(t, "cielab");
  double x = 0, y = 0, z = 0, norm = 0;
  for (std::size_t i = 0; i < tv.size(); ++i) {
    const double s = tables::kD65[i];
    x += tv[i] * s * tables::kXBar10[i];
    y += tv[i] * s * tables::kYBar10[i];
    z += tv[i] * s * tables::kZBar10[i];
    norm += s * tables::kYBar10[i];
  }
  const double k = 100.0 / norm;
  return {k * x, k * y, k * z};
}

inline Tristimulus white_point() {
  double x = 0, y = 0, z = 0;
  for (std::size_t i = 0; i < tables::kD65.size(); ++i) {
    x += tables::kD65[i] * tables::kXBar10[i];
    y += tables::kD65[i] * tables::kYBar10[i];
    z += tables::kD65[i] * tables::kZBar10[i];
  }
  const double k = 100.0 / y;
  return {k * x, k * y, k * z};
}

inline LabColor cielab(const TransmittanceSpectrum& t) {
  const Tristimulus c = tristimulus(t);
  const Tristimulus n = white_point();
  const double fx = detail::lab_f(c.X / n.X);
  const double fy = detail::lab_f(c.Y / n.Y);
  const double fz = detail::lab_f(c.Z / n.Z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

/// Visible-light transmittance in percent: D65 x V(lambda) weighted mean on 10 nm.
inline double tau_v(const TransmittanceSpectrum& t) {
  require(t.wavelengths.size() == t.T.size() && !t.T.empty(), "tau_v: malformed spectrum");
  detail::require_covers(t.wavelengths, tables::kStart, tables::kEnd, tables::kStep10 / 2, "tau_v");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < tables::kV10.size(); ++i) {
    const double w = tables::kD65[2 * i] * tables::kV10[i];
    num += t.T[detail::nearest_index(t.wavelengths, tables::kStart + tables::kStep10 * static_cast<double>(i))] * w;
    den += w;
  }
  return 100.0 * (num / den);
}

}  // namespace sdl::spectra

#endif
