#ifndef SDL_ACQUISITION_NEHVI_HPP
#define SDL_ACQUISITION_NEHVI_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sdl/acquisition/hypervolume.hpp"
#include "sdl/domain.hpp"
#include "sdl/error.hpp"
#include "sdl/pareto.hpp"
#include "sdl/random.hpp"
#include "sdl/surrogate/gp.hpp"

namespace sdl::acquisition {

struct AcquisitionConfig {
  int mc_samples = 128;
  int candidate_pool = 2048;
  int refine_top = 32;
  int refine_iters = 50;
  double tau = 1e-3;
  int q = 10;
  std::uint64_t seed = 0;
  double min_distance = 1e-3;  // unit-cube distance between suggestions

  void validate() const {
    require(mc_samples >= 16, "AcquisitionConfig: mc_samples must be >= 16");
    require(q >= 1, "AcquisitionConfig: q must be >= 1");
    require(candidate_pool >= 1, "AcquisitionConfig: candidate_pool must be >= 1");
    require(refine_top >= 0 && refine_iters >= 0, "AcquisitionConfig: refinement counts must be >= 0");
    require(tau > 0.0 && std::isfinite(tau), "AcquisitionConfig: tau must be positive");
    require(min_distance >= 0.0, "AcquisitionConfig: min_distance must be >= 0");
  }
};

struct NehviEstimate {
  double value = 0.0;      // smoothed expected improvement, exp(log_value)
  double log_value = 0.0;  // log of the smoothed estimate
  double raw_mean = 0.0;   // plain Monte-Carlo mean of per-draw improvements
  double std_error = 0.0;  // standard error of raw_mean
};

namespace detail {

/// log(tau * softplus(x / tau)). The softplus is an upper bound of
/// max(x, 0) that exceeds it by at most tau * log(2).
inline double log_smoothed(double x, double tau) {
  const double z = x / tau;
  if (z > 30.0) return std::log(x + tau * std::log1p(std::exp(-z)));
  if (z < -30.0) return std::log(tau) + z;
  return std::log(tau * std::log1p(std::exp(z)));
}

/// Monte-Carlo summary of per-draw improvements, smoothed and averaged in log space:
///   log_value = logsumexp_s(log(tau * softplus(I_s / tau))) - log(S).
inline NehviEstimate summarize(const std::vector<double>& improvements, double tau) {
  NehviEstimate est;
  const double s = static_cast<double>(improvements.size());
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(improvements.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < improvements.size(); ++i) {
    logs[i] = log_smoothed(improvements[i], tau);
    max_log = std::max(max_log, logs[i]);
    sum += improvements[i];
  }
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - max_log);
  est.log_value = max_log + std::log(acc) - std::log(s);
  est.value = std::exp(est.log_value);
  est.raw_mean = sum / s;
  double ss = 0.0;
  for (double v : improvements) ss += (v - est.raw_mean) * (v - est.raw_mean);
  est.std_error = improvements.size() > 1 ? std::sqrt(ss / (s - 1.0) / s) : 0.0;
  return est;
}

/// Hypervolume improvement of y over the front stored as rows of length m.
inline double hypervolume_improvement(std::span<const double> y, const std::vector<double>& front, std::size_t m,
                                      std::span<const double> ref, std::vector<double>& scratch) {
  double box = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (y[i] <= ref[i]) return 0.0;
    box *= y[i] - ref[i];
  }
  const std::size_t k = front.size() / m;
  scratch.clear();
  for (std::size_t p = 0; p < k; ++p) {
    const double* row = front.data() + p * m;
    bool covers = true;
    bool inside = true;
    for (std::size_t i = 0; i < m; ++i) {
      covers = covers && row[i] >= y[i];
      inside = inside && row[i] > ref[i];
    }
    if (covers) return 0.0;
    if (!inside) continue;
    for (std::size_t i = 0; i < m; ++i) scratch.push_back(std::min(row[i], y[i]));
  }
  if (scratch.empty()) return box;
  return std::max(box - hypervolume_rows(scratch, m, ref), 0.0);
}

// Append y to a front (rows of length m), dropping everything it dominates.
inline void insert_into_front(std::vector<double>& front, std::span<const double> y, std::size_t m) {
  const std::size_t k = front.size() / m;
  std::vector<double> kept;
  kept.reserve(front.size() + m);
  for (std::size_t p = 0; p < k; ++p) {
    std::span<const double> row(front.data() + p * m, m);
    if (dominates(row, y) || std::equal(row.begin(), row.end(), y.begin())) return;
  }
  for (std::size_t p = 0; p < k; ++p) {
    std::span<const double> row(front.data() + p * m, m);
    if (!dominates(y, row)) kept.insert(kept.end(), row.begin(), row.end());
  }
  kept.insert(kept.end(), y.begin(), y.end());
  front.swap(kept);
}

/// Unique rows in lexicographic order.
inline Eigen::MatrixXd unique_rows(const Eigen::MatrixXd& x) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index idx : order)
    if (keep.empty() || less(keep.back(), idx)) keep.push_back(idx);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), x.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(keep[i]);
  return out;
}

}  // namespace detail

/// Noisy expected hypervolume improvement with cached baseline draws.
///
/// Every Monte-Carlo draw re-samples the latent objectives of the observed
/// points jointly from the posterior, takes the Pareto front of that draw as
/// the baseline, and measures the hypervolume a candidate adds to it.
/// Observed points that are dominated in every draw are pruned; this leaves
/// each draw's front unchanged. Candidate outcomes are drawn conditionally
/// on the retained baseline draws, so baseline and candidates are jointly
/// distributed. Pending points (earlier picks of a greedy batch) are folded
/// into the baseline with their own draws.
class NehviEvaluator {
public:
  NehviEvaluator(std::vector<const surrogate::GpModel*> models, const Eigen::MatrixXd& observed_unit,
                 ReferencePoint ref, const AcquisitionConfig& cfg)
      : models_(std::move(models)), ref_(std::move(ref)), samples_(cfg.mc_samples), tau_(cfg.tau), seed_(cfg.seed) {
    cfg.validate();
    m_ = models_.size();
    require(m_ == 2 || m_ == 3, "nehvi: 2 or 3 objective models are required");
    require(ref_.size() == m_, "nehvi: reference point length differs from model count");
    for (const auto* model : models_) {
      require(model != nullptr && model->size() >= 1, "nehvi: untrained model");
      require(model->dim() == observed_unit.cols(), "nehvi: model and observation dimensions differ");
    }
    require(observed_unit.rows() >= 1, "nehvi: at least one observed point is required");
    build_baseline(detail::unique_rows(observed_unit));
  }

  std::size_t objective_count() const { return m_; }
  Eigen::Index baseline_size() const { return baseline_x_.rows(); }
  int samples() const { return samples_; }

  /// Improvement of one candidate over baseline plus pending points; slot
  /// selects the base samples so a picked candidate keeps its draws.
  NehviEstimate evaluate(const Eigen::RowVectorXd& x, int slot) const {
    Eigen::MatrixXd xm = x;
    return evaluate_many(xm, slot).front();
  }

  std::vector<NehviEstimate> evaluate_many(const Eigen::MatrixXd& xs, int slot) const {
    require(xs.cols() == baseline_x_.cols(), "nehvi: candidate dimension mismatch");
    const auto eps = slot_base_samples(slot);
    std::vector<NehviEstimate> out;
    out.reserve(static_cast<std::size_t>(xs.rows()));

    std::vector<Eigen::MatrixXd> draws(m_);  // S x |xs| per objective
    for (std::size_t k = 0; k < m_; ++k) draws[k] = conditional_draws(k, xs, eps[k]);

    std::vector<double> improvements(static_cast<std::size_t>(samples_));
    std::vector<double> y(m_), scratch;
    for (Eigen::Index c = 0; c < xs.rows(); ++c) {
      for (int s = 0; s < samples_; ++s) {
        for (std::size_t k = 0; k < m_; ++k) y[k] = draws[k](s, c);
        improvements[static_cast<std::size_t>(s)] = detail::hypervolume_improvement(
            y, fronts_[static_cast<std::size_t>(s)], m_, ref_.values, scratch);
      }
      out.push_back(detail::summarize(improvements, tau_));
    }
    return out;
  }

  /// Fold a candidate into the baseline using the draws of `slot`.
  void add_pending(const Eigen::RowVectorXd& x, int slot) {
    require(x.size() == baseline_x_.cols(), "nehvi: pending point dimension mismatch");
    const auto eps = slot_base_samples(slot);
    const Eigen::Index nb = baseline_x_.rows();
    Eigen::MatrixXd xm = x;
    std::vector<double> y_rows(static_cast<std::size_t>(samples_) * m_);

    for (std::size_t k = 0; k < m_; ++k) {
      auto& st = objective_[k];
      const auto& model = *models_[k];
      const Eigen::MatrixXd kxc = model.kernel(model.inputs(), xm);
      const Eigen::VectorXd v = model.whiten(kxc).col(0);
      const double mu = kxc.col(0).dot(model.alpha());
      const Eigen::VectorXd cross = model.kernel(baseline_x_, xm).col(0) - st.whitened.transpose() * v;
      const Eigen::VectorXd a = st.chol.topLeftCorner(nb, nb).triangularView<Eigen::Lower>().solve(cross);
      const double var = std::max(model.hyperparameters().signal_variance - v.squaredNorm(), 0.0);
      const double diag = std::sqrt(std::max(var - a.squaredNorm(), 0.0) + surrogate::kMinJitter);

      Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(nb + 1, nb + 1);
      chol.topLeftCorner(nb, nb) = st.chol;
      chol.block(nb, 0, 1, nb) = a.transpose();
      chol(nb, nb) = diag;
      st.chol = std::move(chol);

      Eigen::MatrixXd w(nb + 1, samples_);
      w.topRows(nb) = st.w;
      w.row(nb) = eps[k].transpose();
      const Eigen::VectorXd f = (st.w.transpose() * a).array() + mu + diag * eps[k].array();
      st.w = std::move(w);

      Eigen::MatrixXd whitened(st.whitened.rows(), nb + 1);
      whitened.leftCols(nb) = st.whitened;
      whitened.col(nb) = v;
      st.whitened = std::move(whitened);

      for (int s = 0; s < samples_; ++s)
        y_rows[static_cast<std::size_t>(s) * m_ + k] = f[s] * model.y_scale() + model.y_mean();
    }

    Eigen::MatrixXd bx(nb + 1, baseline_x_.cols());
    bx.topRows(nb) = baseline_x_;
    bx.row(nb) = x;
    baseline_x_ = std::move(bx);

    for (int s = 0; s < samples_; ++s) {
      auto& front = fronts_[static_cast<std::size_t>(s)];
      detail::insert_into_front(front, std::span<const double>(y_rows.data() + static_cast<std::size_t>(s) * m_, m_),
                                m_);
      current_hv_[static_cast<std::size_t>(s)] = hypervolume_rows(front, m_, ref_.values);
    }
  }

  /// Per-draw improvement of baseline-plus-pending over the initial baseline.
  NehviEstimate pending_improvement() const {
    std::vector<double> imp(static_cast<std::size_t>(samples_));
    for (std::size_t s = 0; s < imp.size(); ++s) imp[s] = std::max(current_hv_[s] - initial_hv_[s], 0.0);
    return detail::summarize(imp, tau_);
  }

private:
  struct ObjectiveState {
    Eigen::MatrixXd chol;       // factor of the posterior covariance over baseline points
    Eigen::MatrixXd w;          // whitened baseline draws, |B| x S
    Eigen::MatrixXd whitened;   // L_train^{-1} K(train, B), n_train x |B|
  };

  std::vector<Eigen::VectorXd> slot_base_samples(int slot) const {
    std::vector<Eigen::VectorXd> eps(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      Rng rng(derive_seed(seed_, "nehvi-slot", {static_cast<std::uint64_t>(slot), k}));
      std::normal_distribution<double> normal(0.0, 1.0);
      eps[k].resize(samples_);
      for (int s = 0; s < samples_; ++s) eps[k][s] = normal(rng);
    }
    return eps;
  }

  // Draws (S x |xs|) of objective k at candidates, in target units.
  Eigen::MatrixXd conditional_draws(std::size_t k, const Eigen::MatrixXd& xs, const Eigen::VectorXd& eps) const {
    const auto& st = objective_[k];
    const auto& model = *models_[k];
    const Eigen::MatrixXd kxc = model.kernel(model.inputs(), xs);
    const Eigen::MatrixXd v = model.whiten(kxc);
    const Eigen::VectorXd mu = kxc.transpose() * model.alpha();
    const Eigen::MatrixXd cross = model.kernel(baseline_x_, xs) - st.whitened.transpose() * v;
    const Eigen::MatrixXd a = st.chol.triangularView<Eigen::Lower>().solve(cross);
    const Eigen::ArrayXd var =
        (model.hyperparameters().signal_variance - v.colwise().squaredNorm().transpose().array()).max(0.0);
    const Eigen::ArrayXd cond_sd = (var - a.colwise().squaredNorm().transpose().array()).max(0.0).sqrt();

    Eigen::MatrixXd draws = st.w.transpose() * a;  // S x c
    for (Eigen::Index c = 0; c < xs.rows(); ++c)
      draws.col(c) = ((draws.col(c).array() + mu[c] + cond_sd[c] * eps.array()) * model.y_scale() + model.y_mean())
                         .matrix();
    return draws;
  }

  void build_baseline(const Eigen::MatrixXd& obs) {
    const Eigen::Index n = obs.rows();
    objective_.resize(m_);
    std::vector<Eigen::MatrixXd> values(m_);  // n x S in target units
    std::vector<Eigen::VectorXd> means(m_);
    std::vector<Eigen::MatrixXd> covs(m_);

    for (std::size_t k = 0; k < m_; ++k) {
      const auto& model = *models_[k];
      const Eigen::MatrixXd kxo = model.kernel(model.inputs(), obs);
      const Eigen::MatrixXd v = model.whiten(kxo);
      Eigen::MatrixXd cov = model.kernel(obs, obs) - v.transpose() * v;
      cov = 0.5 * (cov + cov.transpose());
      const auto jc = surrogate::cholesky_with_jitter(cov);
      means[k] = kxo.transpose() * model.alpha();
      covs[k] = std::move(cov);

      Rng rng(derive_seed(seed_, "nehvi-baseline", {k}));
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::MatrixXd z(n, samples_);
      for (int s = 0; s < samples_; ++s)
        for (Eigen::Index i = 0; i < n; ++i) z(i, s) = normal(rng);
      Eigen::MatrixXd f = (jc.lower * z).colwise() + means[k];
      values[k] = (f.array() * model.y_scale() + model.y_mean()).matrix();
      objective_[k].whitened = v;
    }

    // Per-draw Pareto fronts; keep every point that is on some front.
    std::vector<char> keep(static_cast<std::size_t>(n), 0);
    fronts_.assign(static_cast<std::size_t>(samples_), {});
    std::vector<CanonicalObjectives> pts(static_cast<std::size_t>(n));
    for (int s = 0; s < samples_; ++s) {
      for (Eigen::Index i = 0; i < n; ++i) {
        auto& p = pts[static_cast<std::size_t>(i)].values;
        p.resize(m_);
        for (std::size_t k = 0; k < m_; ++k) p[k] = values[k](i, s);
      }
      auto& front = fronts_[static_cast<std::size_t>(s)];
      for (std::size_t idx : pareto_front(pts)) {
        keep[idx] = 1;
        front.insert(front.end(), pts[idx].values.begin(), pts[idx].values.end());
      }
    }
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < n; ++i)
      if (keep[static_cast<std::size_t>(i)]) kept.push_back(i);

    const Eigen::Index nb = static_cast<Eigen::Index>(kept.size());
    baseline_x_.resize(nb, obs.cols());
    for (Eigen::Index i = 0; i < nb; ++i) baseline_x_.row(i) = obs.row(kept[static_cast<std::size_t>(i)]);

    for (std::size_t k = 0; k < m_; ++k) {
      auto& st = objective_[k];
      const auto& model = *models_[k];
      Eigen::MatrixXd cov_b(nb, nb);
      Eigen::MatrixXd whitened_b(st.whitened.rows(), nb);
      Eigen::MatrixXd centered(nb, samples_);
      for (Eigen::Index i = 0; i < nb; ++i) {
        const Eigen::Index src = kept[static_cast<std::size_t>(i)];
        whitened_b.col(i) = st.whitened.col(src);
        for (Eigen::Index j = 0; j < nb; ++j) cov_b(i, j) = covs[k](src, kept[static_cast<std::size_t>(j)]);
        centered.row(i) = (values[k].row(src).array() - model.y_mean()) / model.y_scale() - means[k][src];
      }
      const auto jc = surrogate::cholesky_with_jitter(cov_b);
      st.chol = jc.lower;
      st.w = st.chol.triangularView<Eigen::Lower>().solve(centered);
      st.whitened = std::move(whitened_b);
    }

    initial_hv_.resize(static_cast<std::size_t>(samples_));
    for (int s = 0; s < samples_; ++s)
      initial_hv_[static_cast<std::size_t>(s)] = hypervolume_rows(fronts_[static_cast<std::size_t>(s)], m_, ref_.values);
    current_hv_ = initial_hv_;
  }

  std::vector<const surrogate::GpModel*> models_;
  ReferencePoint ref_;
  int samples_;
  double tau_;
  std::uint64_t seed_;
  std::size_t m_ = 0;
  Eigen::MatrixXd baseline_x_;
  std::vector<ObjectiveState> objective_;
  std::vector<std::vector<double>> fronts_;
  std::vector<double> initial_hv_;
  std::vector<double> current_hv_;
};

/// Joint expected hypervolume improvement of a batch of candidates (raw
/// parameter rows) over the noisy observed front.
inline NehviEstimate nehvi_estimate(const std::vector<const surrogate::GpModel*>& models,
                                    const Eigen::MatrixXd& candidates_raw, const Eigen::MatrixXd& observed_raw,
                                    const ReferencePoint& ref, const AcquisitionConfig& cfg) {
  require(!models.empty() && models.front() != nullptr, "nehvi: no models");
  require(candidates_raw.rows() >= 1, "nehvi: at least one candidate is required");
  require(candidates_raw.cols() == models.front()->dim(), "nehvi: candidate dimension mismatch");
  NehviEvaluator evaluator(models, models.front()->normalize(observed_raw), ref, cfg);
  const Eigen::MatrixXd cu = models.front()->normalize(candidates_raw);
  for (Eigen::Index i = 0; i < cu.rows(); ++i) evaluator.add_pending(cu.row(i), static_cast<int>(i));
  return evaluator.pending_improvement();
}

inline double nehvi(const std::vector<const surrogate::GpModel*>& models, const Eigen::MatrixXd& candidates_raw,
                    const Eigen::MatrixXd& observed_raw, const ReferencePoint& ref, const AcquisitionConfig& cfg) {
  return nehvi_estimate(models, candidates_raw, observed_raw, ref, cfg).value;
}

}  // namespace sdl::acquisition

#endif
