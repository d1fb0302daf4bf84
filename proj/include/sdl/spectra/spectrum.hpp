#ifndef SDL_SPECTRA_SPECTRUM_HPP
#define SDL_SPECTRA_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sdl/error.hpp"

namespace sdl::spectra {

inline constexpr double kTransmittanceFloor = 1e-6;
inline constexpr double kTransmittanceCeiling = 10.0;
inline constexpr double kOdWindowLo = 650.0;
inline constexpr double kOdWindowHi = 900.0;

struct RawSpectrum {
  std::vector<double> wavelengths;  // nm, strictly increasing
  std::vector<double> sample_counts;
  std::vector<double> dark_counts;
  std::vector<double> reference_counts;

  std::size_t size() const { return wavelengths.size(); }

  void validate() const {
    const std::size_t n = wavelengths.size();
    require(n >= 2, "spectrum: at least two wavelengths are required");
    require(sample_counts.size() == n && dark_counts.size() == n && reference_counts.size() == n,
            "spectrum: channel lengths differ");
    for (std::size_t i = 0; i < n; ++i) {
      require(std::isfinite(wavelengths[i]) && std::isfinite(sample_counts[i]) && std::isfinite(dark_counts[i]) &&
                  std::isfinite(reference_counts[i]),
              "spectrum: non-finite value");
      if (i > 0) require(wavelengths[i] > wavelengths[i - 1], "spectrum: wavelengths must be strictly increasing");
    }
  }

  bool operator==(const RawSpectrum&) const = default;
};

struct TransmittanceSpectrum {
  std::vector<double> wavelengths;
  std::vector<double> T;
  bool clamped = false;  // true if any value hit the floor or ceiling
};

struct AbsorbanceSpectrum {
  std::vector<double> wavelengths;
  std::vector<double> A;
};

/// (sample - dark) / (reference - dark), clamped to [1e-6, 10].
inline TransmittanceSpectrum transmittance(const RawSpectrum& raw) {
  raw.validate();
  TransmittanceSpectrum t;
  t.wavelengths = raw.wavelengths;
  t.T.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double denom = raw.reference_counts[i] - raw.dark_counts[i];
    if (!(denom > 0.0))
      throw ValidationError("transmittance: reference counts do not exceed dark counts at " +
                            std::to_string(raw.wavelengths[i]) + " nm");
    const double v = (raw.sample_counts[i] - raw.dark_counts[i]) / denom;
    const double c = std::clamp(v, kTransmittanceFloor, kTransmittanceCeiling);
    if (c != v) t.clamped = true;
    t.T[i] = c;
  }
  return t;
}

inline AbsorbanceSpectrum absorbance(const TransmittanceSpectrum& t) {
  AbsorbanceSpectrum a;
  a.wavelengths = t.wavelengths;
  a.A.resize(t.T.size());
  for (std::size_t i = 0; i < t.T.size(); ++i) {
    require(t.T[i] > 0.0, "absorbance: transmittance must be positive");
    a.A[i] = -std::log10(t.T[i]);
  }
  return a;
}

namespace detail {

inline void require_covers(const std::vector<double>& w, double lo, double hi, double tol, const char* what) {
  if (w.empty() || w.front() > lo + tol || w.back() < hi - tol)
    throw ValidationError(std::string(what) + ": spectrum does not cover [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] nm");
}

// Index of the grid point closest to x (ties go to the lower wavelength).
inline std::size_t nearest_index(const std::vector<double>& w, double x) {
  auto it = std::lower_bound(w.begin(), w.end(), x);
  if (it == w.begin()) return 0;
  if (it == w.end()) return w.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - w.begin());
  return (x - w[hi - 1] <= w[hi] - x) ? hi - 1 : hi;
}

}  // namespace detail

/// Maximum absorbance over grid points inside [650, 900] nm.
inline double optical_density(const AbsorbanceSpectrum& a) {
  require(a.wavelengths.size() == a.A.size(), "optical_density: length mismatch");
  detail::require_covers(a.wavelengths, kOdWindowLo, kOdWindowHi, 1e-9, "optical_density");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.A.size(); ++i)
    if (a.wavelengths[i] >= kOdWindowLo && a.wavelengths[i] <= kOdWindowHi) best = std::max(best, a.A[i]);
  if (!std::isfinite(best)) throw ValidationError("optical_density: no grid points inside the window");
  return best;
}

inline double optical_density(const RawSpectrum& raw) { return optical_density(absorbance(transmittance(raw))); }

// CSV with header wavelength_nm,sample,dark,reference. Values are written
// with 17 significant digits so a read-back is bit-exact.
inline void write_spectrum_csv(std::ostream& out, const RawSpectrum& s) {
  out << "wavelength_nm,sample,dark,reference\n";
  char buf[128];
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.wavelengths[i], s.sample_counts[i],
                  s.dark_counts[i], s.reference_counts[i]);
    out << buf;
  }
}

inline void write_spectrum_csv_file(const std::string& path, const RawSpectrum& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write spectrum: " + path);
  write_spectrum_csv(out, s);
  if (!out) throw IoError("failed writing spectrum: " + path);
}

inline RawSpectrum read_spectrum_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("spectrum CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "wavelength_nm,sample,dark,reference")
    throw ValidationError("spectrum CSV: expected header 'wavelength_nm,sample,dark,reference'");
  RawSpectrum s;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[4];
    std::istringstream ss(line);
    std::string cell;
    for (int k = 0; k < 4; ++k) {
      if (!std::getline(ss, cell, ','))
        throw ValidationError("spectrum CSV: line " + std::to_string(lineno) + " has fewer than 4 fields");
      char* end = nullptr;
      v[k] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ValidationError("spectrum CSV: line " + std::to_string(lineno) + " has a non-numeric field");
    }
    if (std::getline(ss, cell, ','))
      throw ValidationError("spectrum CSV: line " + std::to_string(lineno) + " has more than 4 fields");
    s.wavelengths.push_back(v[0]);
    s.sample_counts.push_back(v[1]);
    s.dark_counts.push_back(v[2]);
    s.reference_counts.push_back(v[3]);
  }
  s.validate();
  return s;
}

inline RawSpectrum read_spectrum_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spectrum: " + path);
  return read_spectrum_csv(in);
}

}  // namespace sdl::spectra

#endif
