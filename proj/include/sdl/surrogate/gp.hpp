#ifndef SDL_SURROGATE_GP_HPP
#define SDL_SURROGATE_GP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sdl/domain.hpp"
#include "sdl/error.hpp"
#include "sdl/random.hpp"
#include "sdl/surrogate/linalg.hpp"

namespace sdl::surrogate {

/// Matern-5/2 with one lengthscale per input dimension.
struct Matern52 {
  static double shape(double r) {
    const double s = std::sqrt(5.0) * r;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
  }

  // -(1/r) d shape / dr, finite at r = 0
  static double radial_derivative(double r) {
    const double s = std::sqrt(5.0) * r;
    return (5.0 / 3.0) * (1.0 + s) * std::exp(-s);
  }
};

struct Hyperparameters {
  Eigen::VectorXd lengthscales;  // unit-cube units
  double signal_variance = 1.0;  // standardized units
  double noise_variance = 1e-2;  // standardized units

  Eigen::VectorXd to_log() const {
    Eigen::VectorXd theta(lengthscales.size() + 2);
    theta.head(lengthscales.size()) = lengthscales.array().log();
    theta[lengthscales.size()] = std::log(signal_variance);
    theta[lengthscales.size() + 1] = std::log(std::max(noise_variance, 1e-300));
    return theta;
  }

  static Hyperparameters from_log(const Eigen::VectorXd& theta) {
    const Eigen::Index d = theta.size() - 2;
    Hyperparameters h;
    h.lengthscales = theta.head(d).array().exp();
    h.signal_variance = std::exp(theta[d]);
    h.noise_variance = std::exp(theta[d + 1]);
    return h;
  }
};

struct GpConfig {
  int restarts = 8;
  Interval lengthscale_bounds{0.05, 10.0};
  Interval signal_variance_bounds{1e-3, 100.0};
  Interval noise_bounds{1e-6, 1.0};
  double jitter = 1e-10;
  int max_iterations = 100;
  // When set, the noise variance (standardized units) is held fixed.
  std::optional<double> fixed_noise;

  void validate() const {
    require(restarts >= 1, "GpConfig: restarts must be >= 1");
    require(max_iterations >= 1, "GpConfig: max_iterations must be >= 1");
    for (const auto& b : {lengthscale_bounds, signal_variance_bounds, noise_bounds})
      require(b.lo > 0.0 && b.lo < b.hi, "GpConfig: hyperparameter bounds must satisfy 0 < lo < hi");
    require(jitter >= kMinJitter && jitter <= kMaxJitter, "GpConfig: jitter must lie in [1e-10, 1e-4]");
    if (fixed_noise) require(*fixed_noise >= 0.0, "GpConfig: fixed noise must be non-negative");
  }
};

struct Prediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// A conditioned Gaussian process. Inputs live in the unit cube given by the
/// declared input bounds; targets are standardized internally.
class GpModel {
public:
  GpModel() = default;

  /// Condition on data with fixed hyperparameters. Rows are put into
  /// lexicographic (x, y) order first, so the model does not depend on the
  /// order the data arrived in.
  static GpModel condition(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y,
                           std::vector<Interval> input_bounds, Hyperparameters hyper,
                           double jitter = kMinJitter) {
    GpModel m;
    m.input_bounds_ = std::move(input_bounds);
    m.prepare_data(x_raw, y);
    require(hyper.lengthscales.size() == m.x_.cols(), "GpModel: lengthscale count must match input dimension");
    require((hyper.lengthscales.array() > 0.0).all() && hyper.signal_variance > 0.0,
            "GpModel: lengthscales and signal variance must be positive");
    require(hyper.noise_variance >= 0.0, "GpModel: noise variance must be non-negative");
    m.hyper_ = std::move(hyper);
    m.jitter_start_ = jitter;
    m.refactor();
    return m;
  }

  Prediction predict(const Eigen::MatrixXd& x_raw) const { return predict_normalized(normalize(x_raw)); }

  Prediction predict_normalized(const Eigen::MatrixXd& xq) const {
    require(xq.cols() == x_.cols(), "predict: query dimension does not match training dimension");
    const Eigen::MatrixXd kxq = kernel(x_, xq);
    const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(kxq);
    Prediction p;
    p.mean = (kxq.transpose() * alpha_).array() * y_scale_ + y_mean_;
    p.variance = ((hyper_.signal_variance - v.colwise().squaredNorm().transpose().array()).max(0.0)) *
                 (y_scale_ * y_scale_);
    return p;
  }

  double log_marginal_likelihood() const {
    const double n = static_cast<double>(x_.rows());
    return -0.5 * y_.dot(alpha_) - chol_.diagonal().array().log().sum() - 0.5 * n * std::log(2.0 * M_PI);
  }

  /// Gradient over (log lengthscales, log signal variance, log noise variance).
  Eigen::VectorXd lml_gradient() const {
    return lml_and_gradient(x_, y_, hyper_, jitter_, true).gradient;
  }

  Eigen::MatrixXd normalize(const Eigen::MatrixXd& x_raw) const {
    require(static_cast<std::size_t>(x_raw.cols()) == input_bounds_.size(),
            "GpModel: input dimension does not match declared bounds");
    Eigen::MatrixXd u(x_raw.rows(), x_raw.cols());
    for (Eigen::Index j = 0; j < x_raw.cols(); ++j) {
      const auto& b = input_bounds_[static_cast<std::size_t>(j)];
      u.col(j) = (x_raw.col(j).array() - b.lo) / b.width();
    }
    return u;
  }

  /// Signal covariance sigma_f^2 k(a, b) in standardized units.
  Eigen::MatrixXd kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
    return kernel_matrix(a, b, hyper_);
  }

  /// L^{-1} K(X, Q): the whitened cross covariance used for posterior
  /// covariances between query sets.
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& kxq) const {
    return chol_.triangularView<Eigen::Lower>().solve(kxq);
  }

  /// Posterior mean in standardized units.
  Eigen::VectorXd mean_standardized(const Eigen::MatrixXd& xq) const { return kernel(x_, xq).transpose() * alpha_; }

  const Eigen::MatrixXd& inputs() const { return x_; }
  const Eigen::VectorXd& targets_standardized() const { return y_; }
  const std::vector<Interval>& input_bounds() const { return input_bounds_; }
  const Hyperparameters& hyperparameters() const { return hyper_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return x_.rows(); }
  Eigen::Index dim() const { return x_.cols(); }

  /// Signal variance in the units of the training targets.
  double signal_variance() const { return hyper_.signal_variance * y_scale_ * y_scale_; }
  double noise_variance() const { return hyper_.noise_variance * y_scale_ * y_scale_; }

  // Shared with fit(): value and gradient for arbitrary hyperparameters.
  struct LmlResult {
    double value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd gradient;
  };

  static Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Hyperparameters& h) {
    Eigen::MatrixXd k(a.rows(), b.rows());
    const Eigen::ArrayXd inv_l = h.lengthscales.array().inverse();
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double r = ((a.row(i) - b.row(j)).transpose().array() * inv_l).matrix().norm();
        k(i, j) = h.signal_variance * Matern52::shape(r);
      }
    }
    return k;
  }

  static LmlResult lml_and_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Hyperparameters& h,
                                    double jitter_start, bool with_gradient, double* jitter_used = nullptr) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const Eigen::ArrayXd inv_l = h.lengthscales.array().inverse();

    Eigen::MatrixXd k(n, n);
    Eigen::MatrixXd g(with_gradient ? n : 0, with_gradient ? n : 0);
    for (Eigen::Index j = 0; j < n; ++j) {
      k(j, j) = h.signal_variance;
      if (with_gradient) g(j, j) = h.signal_variance * Matern52::radial_derivative(0.0);
      for (Eigen::Index i = j + 1; i < n; ++i) {
        const double r = ((x.row(i) - x.row(j)).transpose().array() * inv_l).matrix().norm();
        k(i, j) = k(j, i) = h.signal_variance * Matern52::shape(r);
        if (with_gradient) g(i, j) = g(j, i) = h.signal_variance * Matern52::radial_derivative(r);
      }
    }
    Eigen::MatrixXd ky = k;
    ky.diagonal().array() += h.noise_variance;

    LmlResult out;
    JitteredCholesky jc;
    try {
      jc = cholesky_with_jitter(ky, jitter_start);
    } catch (const NumericalError&) {
      if (jitter_used) *jitter_used = std::numeric_limits<double>::quiet_NaN();
      throw;
    }
    if (jitter_used) *jitter_used = jc.jitter;
    const auto l = jc.lower.triangularView<Eigen::Lower>();
    const auto lt = jc.lower.transpose().triangularView<Eigen::Upper>();
    const Eigen::VectorXd alpha = lt.solve(l.solve(y));
    out.value = -0.5 * y.dot(alpha) - jc.lower.diagonal().array().log().sum() -
                0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
    if (!with_gradient) return out;

    Eigen::MatrixXd kinv = l.solve(Eigen::MatrixXd::Identity(n, n));
    kinv = lt.solve(kinv);
    const Eigen::MatrixXd w = alpha * alpha.transpose() - kinv;

    out.gradient.resize(d + 2);
    for (Eigen::Index c = 0; c < d; ++c) {
      double acc = 0.0;
      const double il2 = inv_l[c] * inv_l[c];
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) {
          const double diff = x(i, c) - x(j, c);
          acc += w(i, j) * g(i, j) * diff * diff * il2;
        }
      }
      out.gradient[c] = acc;  // 0.5 * 2 for the symmetric off-diagonal pairs
    }
    out.gradient[d] = 0.5 * (w.array() * k.array()).sum();
    out.gradient[d + 1] = 0.5 * h.noise_variance * w.trace();
    return out;
  }

private:
  void prepare_data(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y) {
    require(x_raw.rows() >= 1, "GpModel: at least one training row is required");
    require(x_raw.rows() == y.size(), "GpModel: row count of X and y differ");
    require(x_raw.allFinite() && y.allFinite(), "GpModel: training data must be finite");
    const Eigen::MatrixXd u = normalize(x_raw);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(u.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      for (Eigen::Index j = 0; j < u.cols(); ++j) {
        if (u(a, j) != u(b, j)) return u(a, j) < u(b, j);
      }
      return y[a] < y[b];
    });
    x_.resize(u.rows(), u.cols());
    Eigen::VectorXd ys(y.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      x_.row(static_cast<Eigen::Index>(i)) = u.row(order[i]);
      ys[static_cast<Eigen::Index>(i)] = y[order[i]];
    }

    y_mean_ = ys.mean();
    const double var = (ys.array() - y_mean_).square().mean();
    const double sd = std::sqrt(var);
    y_scale_ = sd > 1e-12 * std::max(1.0, std::abs(y_mean_)) ? sd : 1.0;
    y_ = (ys.array() - y_mean_) / y_scale_;
  }

  void refactor() {
    Eigen::MatrixXd ky = kernel(x_, x_);
    ky.diagonal().array() += hyper_.noise_variance;
    JitteredCholesky jc = cholesky_with_jitter(ky, jitter_start_);
    chol_ = std::move(jc.lower);
    jitter_ = jc.jitter;
    alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(chol_.triangularView<Eigen::Lower>().solve(y_));
  }

  std::vector<Interval> input_bounds_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Hyperparameters hyper_;
  double jitter_start_ = kMinJitter;
  double jitter_ = kMinJitter;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
};

namespace detail {

struct LogBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Eigen::VectorXd project(Eigen::VectorXd t) const { return t.cwiseMax(lo).cwiseMin(hi); }
};

inline LogBox make_log_box(Eigen::Index d, const GpConfig& cfg) {
  LogBox box;
  box.lo.resize(d + 2);
  box.hi.resize(d + 2);
  box.lo.head(d).setConstant(std::log(cfg.lengthscale_bounds.lo));
  box.hi.head(d).setConstant(std::log(cfg.lengthscale_bounds.hi));
  box.lo[d] = std::log(cfg.signal_variance_bounds.lo);
  box.hi[d] = std::log(cfg.signal_variance_bounds.hi);
  if (cfg.fixed_noise) {
    const double v = std::log(std::max(*cfg.fixed_noise, 1e-300));
    box.lo[d + 1] = box.hi[d + 1] = v;
  } else {
    box.lo[d + 1] = std::log(cfg.noise_bounds.lo);
    box.hi[d + 1] = std::log(cfg.noise_bounds.hi);
  }
  return box;
}

struct AscentResult {
  Eigen::VectorXd theta;
  double value = -std::numeric_limits<double>::infinity();
};

// Projected gradient ascent with Barzilai-Borwein steps and Armijo
// backtracking along the projection arc.
inline AscentResult projected_ascent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LogBox& box,
                                     Eigen::VectorXd theta, const GpConfig& cfg, double noise_exact) {
  auto eval = [&](const Eigen::VectorXd& t, bool grad) {
    Hyperparameters h = Hyperparameters::from_log(t);
    if (cfg.fixed_noise) h.noise_variance = noise_exact;
    try {
      auto r = GpModel::lml_and_gradient(x, y, h, cfg.jitter, grad);
      if (!std::isfinite(r.value)) r.value = -std::numeric_limits<double>::infinity();
      return r;
    } catch (const NumericalError&) {
      return GpModel::LmlResult{};
    }
  };

  theta = box.project(theta);
  auto cur = eval(theta, true);
  if (!std::isfinite(cur.value)) return {theta, cur.value};
  double step = 0.1;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    Eigen::VectorXd grad = cur.gradient;
    const Eigen::VectorXd pg = box.project(theta + grad) - theta;
    if (pg.norm() < 1e-6) break;

    bool accepted = false;
    Eigen::VectorXd next_theta;
    GpModel::LmlResult next;
    for (int ls = 0; ls < 30; ++ls) {
      next_theta = box.project(theta + step * grad);
      next = eval(next_theta, false);
      if (std::isfinite(next.value) && next.value >= cur.value + 1e-4 * grad.dot(next_theta - theta)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    next = eval(next_theta, true);
    const Eigen::VectorXd s = next_theta - theta;
    const Eigen::VectorXd yk = next.gradient - grad;
    const double improvement = next.value - cur.value;
    theta = next_theta;
    cur = std::move(next);
    const double sy = -s.dot(yk);
    step = sy > 1e-16 ? std::clamp(s.squaredNorm() / sy, 1e-4, 1e3) : std::min(step * 2.0, 1e3);
    if (improvement < 1e-9 * (1.0 + std::abs(cur.value))) break;
  }
  return {theta, cur.value};
}

}  // namespace detail

/// Fit hyperparameters by multi-start maximization of the log marginal
/// likelihood over log-parameters inside the configured box.
inline GpModel fit(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y, std::vector<Interval> input_bounds,
                   const GpConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  require(x_raw.rows() >= 2, "fit: at least two training rows are required");
  require(x_raw.allFinite() && y.allFinite(), "fit: non-finite training data");
  for (std::size_t j = 0; j < input_bounds.size(); ++j)
    require(input_bounds[j].lo < input_bounds[j].hi, "fit: input bounds must satisfy lo < hi");

  // Condition once with placeholder hyperparameters to normalize and sort.
  const Eigen::Index d = x_raw.cols();
  Hyperparameters init;
  init.lengthscales = Eigen::VectorXd::Constant(d, 0.5);
  init.signal_variance = 1.0;
  init.noise_variance = cfg.fixed_noise ? *cfg.fixed_noise : 1e-2;
  {
    // Distinctness: fewer than two distinct rows carries no lengthscale signal.
    bool distinct = false;
    for (Eigen::Index i = 1; i < x_raw.rows() && !distinct; ++i) distinct = !(x_raw.row(i) == x_raw.row(0));
    require(distinct, "fit: at least two distinct input rows are required");
  }
  GpModel data = GpModel::condition(x_raw, y, input_bounds, init, kMaxJitter);
  const Eigen::MatrixXd& xu = data.inputs();
  const Eigen::VectorXd& ys = data.targets_standardized();

  const detail::LogBox box = detail::make_log_box(d, cfg);
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  detail::AscentResult best;
  for (int r = 0; r < cfg.restarts; ++r) {
    Eigen::VectorXd theta(d + 2);
    if (r == 0) {
      theta = init.to_log();
    } else {
      for (Eigen::Index i = 0; i < d + 2; ++i) theta[i] = box.lo[i] + unit(rng) * (box.hi[i] - box.lo[i]);
    }
    if (cfg.fixed_noise) theta[d + 1] = box.lo[d + 1];
    auto res = detail::projected_ascent(xu, ys, box, theta, cfg, cfg.fixed_noise.value_or(0.0));
    if (res.value > best.value) best = std::move(res);
  }
  if (!std::isfinite(best.value))
    throw NumericalError("fit: no restart produced a finite log marginal likelihood");

  Hyperparameters h = Hyperparameters::from_log(best.theta);
  if (cfg.fixed_noise) h.noise_variance = *cfg.fixed_noise;
  return GpModel::condition(x_raw, y, std::move(input_bounds), std::move(h), cfg.jitter);
}

inline std::vector<Interval> to_intervals(const ParameterBounds& b) {
  const auto a = b.to_array();
  return {a.begin(), a.end()};
}

/// Joint draws of the latent function at the query rows (count x |Xq|).
inline Eigen::MatrixXd posterior_sample(const GpModel& m, const Eigen::MatrixXd& xq_raw, int count,
                                        std::uint64_t seed) {
  require(count >= 1, "posterior_sample: count must be >= 1");
  const Eigen::MatrixXd xq = m.normalize(xq_raw);
  const Eigen::MatrixXd kxq = m.kernel(m.inputs(), xq);
  const Eigen::MatrixXd v = m.whiten(kxq);
  Eigen::MatrixXd cov = m.kernel(xq, xq) - v.transpose() * v;
  cov = 0.5 * (cov + cov.transpose());
  const Eigen::MatrixXd factor = psd_factor(cov);
  const Eigen::VectorXd mean = kxq.transpose() * m.alpha();

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(xq.rows(), count);
  for (Eigen::Index s = 0; s < count; ++s)
    for (Eigen::Index i = 0; i < xq.rows(); ++i) z(i, s) = normal(rng);
  Eigen::MatrixXd draws = (factor * z).colwise() + mean;
  draws = (draws.array() * m.y_scale() + m.y_mean()).matrix();
  return draws.transpose();
}

inline void to_json(nlohmann::json& j, const GpModel& m) {
  auto mat = [](const Eigen::MatrixXd& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      std::vector<double> r(static_cast<std::size_t>(a.cols()));
      for (Eigen::Index k = 0; k < a.cols(); ++k) r[static_cast<std::size_t>(k)] = a(i, k);
      rows.push_back(r);
    }
    return rows;
  };
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : m.input_bounds()) bounds.push_back({b.lo, b.hi});
  j = nlohmann::json{{"X", mat(m.inputs())},
                     {"y", vec(m.targets_standardized())},
                     {"y_mean", m.y_mean()},
                     {"y_scale", m.y_scale()},
                     {"input_bounds", bounds},
                     {"lengthscales", vec(m.hyperparameters().lengthscales)},
                     {"signal_variance", m.hyperparameters().signal_variance},
                     {"noise_variance", m.hyperparameters().noise_variance},
                     {"jitter", m.jitter()},
                     {"chol", mat(m.chol())},
                     {"alpha", vec(m.alpha())}};
}

/// Rebuilds the model from its stored training data; the factor is recomputed.
inline GpModel gp_model_from_json(const nlohmann::json& j) {
  std::vector<Interval> bounds;
  for (const auto& b : j.at("input_bounds")) bounds.push_back({b[0].get<double>(), b[1].get<double>()});
  const auto rows = j.at("X");
  const auto yv = j.at("y").get<std::vector<double>>();
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(bounds.size());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  const double mean = j.at("y_mean").get<double>();
  const double scale = j.at("y_scale").get<double>();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const auto& b = bounds[static_cast<std::size_t>(k)];
      x(i, k) = b.lo + rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>() * b.width();
    }
    y[i] = yv[static_cast<std::size_t>(i)] * scale + mean;
  }
  Hyperparameters h;
  const auto ls = j.at("lengthscales").get<std::vector<double>>();
  h.lengthscales = Eigen::Map<const Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size()));
  h.signal_variance = j.at("signal_variance").get<double>();
  h.noise_variance = j.at("noise_variance").get<double>();
  return GpModel::condition(x, y, std::move(bounds), std::move(h), j.at("jitter").get<double>());
}

}  // namespace sdl::surrogate

#endif
