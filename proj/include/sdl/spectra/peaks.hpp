#ifndef SDL_SPECTRA_PEAKS_HPP
#define SDL_SPECTRA_PEAKS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sdl/error.hpp"

namespace sdl::spectra {

struct GaussianPeak {
  double center = 0.0;     // nm
  double width = 1.0;      // nm, standard deviation
  double amplitude = 0.0;  // spectrum units
};

struct PeakFitResult {
  std::vector<GaussianPeak> peaks;  // sorted by center
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // sum of squares after each accepted step
};

struct PeakFitOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-8;
  double initial_damping = 1e-3;
  double max_damping = 1e16;
};

/// Greedy peak picking: take the maximum of a 5-point moving average, read
/// the width off the half-maximum crossings, subtract that Gaussian and
/// repeat. Falls back to equally spaced centers (width = support / (4 n))
/// once nothing positive is left.
inline std::vector<GaussianPeak> default_peak_guesses(const std::vector<double>& x, const std::vector<double>& y,
                                                      int n_peaks) {
  require(n_peaks >= 1, "peak fit: n_peaks must be >= 1");
  require(!x.empty() && x.size() == y.size(), "peak fit: malformed spectrum");
  const std::size_t n = x.size();
  const double lo = x.front();
  const double span = x.back() - x.front();
  std::vector<double> rest(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = k >= 2 ? k - 2 : 0, b = std::min(n - 1, k + 2);
    double s = 0.0;
    for (std::size_t i = a; i <= b; ++i) s += y[i];
    rest[k] = s / static_cast<double>(b - a + 1);
  }
  std::vector<GaussianPeak> init;
  for (int i = 0; i < n_peaks; ++i) {
    const std::size_t k = static_cast<std::size_t>(std::max_element(rest.begin(), rest.end()) - rest.begin());
    GaussianPeak p;
    bool picked = rest[k] > 0.0;
    for (const auto& q : init) picked = picked && std::abs(x[k] - q.center) > 1e-9 * std::max(1.0, span);
    if (picked) {
      const double half = 0.5 * rest[k];
      std::size_t l = k, r = k;
      while (l > 0 && rest[l] > half) --l;
      while (r + 1 < n && rest[r] > half) ++r;
      const double fwhm = std::max(x[r] - x[l], span / static_cast<double>(n));
      p = {x[k], fwhm / 2.354820045, rest[k]};
    } else {
      p.center = lo + span * (i + 0.5) / n_peaks;
      p.width = span / (4.0 * n_peaks);
      const auto it = std::lower_bound(x.begin(), x.end(), p.center);
      p.amplitude = std::max(0.0, y[std::min(static_cast<std::size_t>(it - x.begin()), n - 1)]);
      for (const auto& q : init)
        if (std::abs(q.center - p.center) <= 1e-9 * std::max(1.0, span)) p.center += 0.25 * span / n_peaks;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double z = (x[j] - p.center) / p.width;
      rest[j] -= p.amplitude * std::exp(-0.5 * z * z);
    }
    init.push_back(p);
  }
  return init;
}

namespace detail {

// Parameter layout: (amplitude, center, width) per peak.
inline void residual_and_jacobian(const Eigen::VectorXd& theta, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                  Eigen::VectorXd& r, Eigen::MatrixXd* J) {
  const Eigen::Index n = x.size();
  r.resize(n);
  if (J) J->setZero(n, theta.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); i += 3) {
      const double a = theta[i], c = theta[i + 1], w = theta[i + 2];
      const double d = x[k] - c;
      const double g = std::exp(-0.5 * d * d / (w * w));
      s += a * g;
      if (J) {
        (*J)(k, i) = g;
        (*J)(k, i + 1) = a * g * d / (w * w);
        (*J)(k, i + 2) = a * g * d * d / (w * w * w);
      }
    }
    r[k] = s - y[k];
  }
}

inline void project(Eigen::VectorXd& theta, double min_width, double lo, double hi) {
  for (Eigen::Index i = 0; i < theta.size(); i += 3) {
    theta[i] = std::max(0.0, theta[i]);
    theta[i + 1] = std::clamp(theta[i + 1], lo, hi);
    theta[i + 2] = std::max(min_width, theta[i + 2]);
  }
}

}  // namespace detail

/// Least-squares fit of a sum of Gaussians by Levenberg-Marquardt with
/// amplitudes kept non-negative, widths positive and centers inside the support.
inline PeakFitResult fit_gaussian_peaks(const std::vector<double>& x, const std::vector<double>& y, int n_peaks,
                                        std::optional<std::vector<GaussianPeak>> init = std::nullopt,
                                        const PeakFitOptions& opt = {}) {
  require(n_peaks >= 1, "peak fit: n_peaks must be >= 1");
  require(x.size() == y.size(), "peak fit: x and y lengths differ");
  require(x.size() > 3 * static_cast<std::size_t>(n_peaks), "peak fit: need more than 3 points per peak");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(std::isfinite(x[i]) && std::isfinite(y[i]), "peak fit: non-finite input");
    if (i > 0) require(x[i] > x[i - 1], "peak fit: x must be strictly increasing");
  }
  std::vector<GaussianPeak> guesses = init ? *init : default_peak_guesses(x, y, n_peaks);
  require(guesses.size() == static_cast<std::size_t>(n_peaks), "peak fit: init size differs from n_peaks");
  const double span = x.back() - x.front();
  for (std::size_t i = 0; i < guesses.size(); ++i) {
    require(guesses[i].width > 0.0 && std::isfinite(guesses[i].center), "peak fit: invalid initial peak");
    for (std::size_t j = 0; j < i; ++j)
      require(std::abs(guesses[i].center - guesses[j].center) > 1e-9 * std::max(1.0, span),
              "peak fit: coincident initial centers");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  Eigen::VectorXd theta(3 * n_peaks);
  for (int i = 0; i < n_peaks; ++i) {
    theta[3 * i] = std::max(0.0, guesses[static_cast<std::size_t>(i)].amplitude);
    theta[3 * i + 1] = guesses[static_cast<std::size_t>(i)].center;
    theta[3 * i + 2] = guesses[static_cast<std::size_t>(i)].width;
  }
  const double min_width = 1e-9 * std::max(1.0, span);

  PeakFitResult out;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  detail::residual_and_jacobian(theta, xv, yv, r, &J);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) throw NumericalError("peak fit: non-finite residual at the initial guess");
  double lambda = opt.initial_damping;

  while (out.iterations < opt.max_iterations && cost > 0.0) {
    ++out.iterations;
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd diag = JtJ.diagonal();
    const double floor = 1e-12 * std::max(1.0, diag.maxCoeff());
    for (Eigen::Index i = 0; i < diag.size(); ++i) diag[i] = std::max(diag[i], floor);

    bool accepted = false;
    while (lambda <= opt.max_damping) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += lambda * diag;
      Eigen::VectorXd step = A.ldlt().solve(-g);
      Eigen::VectorXd trial = theta + step;
      detail::project(trial, min_width, x.front(), x.back());
      Eigen::VectorXd r_trial;
      detail::residual_and_jacobian(trial, xv, yv, r_trial, nullptr);
      const double c_trial = r_trial.squaredNorm();
      if (std::isfinite(c_trial) && c_trial < cost) {
        const double rel = (cost - c_trial) / cost;
        theta = trial;
        cost = c_trial;
        detail::residual_and_jacobian(theta, xv, yv, r, &J);
        out.residual_history.push_back(cost);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel < opt.relative_tolerance) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!theta.allFinite()) throw NumericalError("peak fit: parameters diverged");
    // No damped step reduces the cost: the iterate is stationary.
    if (!accepted) {
      out.converged = true;
      break;
    }
    if (out.converged) break;
  }
  if (cost == 0.0) out.converged = true;

  for (int i = 0; i < n_peaks; ++i) out.peaks.push_back({theta[3 * i + 1], theta[3 * i + 2], theta[3 * i]});
  std::sort(out.peaks.begin(), out.peaks.end(),
            [](const GaussianPeak& a, const GaussianPeak& b) { return a.center < b.center; });
  out.residual_norm = std::sqrt(cost);
  return out;
}

inline double evaluate_peaks(const std::vector<GaussianPeak>& peaks, double x) {
  double s = 0.0;
  for (const auto& p : peaks) {
    const double z = (x - p.center) / p.width;
    s += p.amplitude * std::exp(-0.5 * z * z);
  }
  return s;
}

}  // namespace sdl::spectra

#endif
