#ifndef SDL_ACQUISITION_SUGGEST_HPP
#define SDL_ACQUISITION_SUGGEST_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sdl/acquisition/nehvi.hpp"
#include "sdl/domain.hpp"
#include "sdl/error.hpp"
#include "sdl/random.hpp"

namespace sdl::acquisition {

/// Random candidate pool in the unit cube for greedy slot `slot`.
inline Eigen::MatrixXd candidate_pool(Eigen::Index dim, const AcquisitionConfig& cfg, int slot) {
  Rng rng(derive_seed(cfg.seed, "pool", {static_cast<std::uint64_t>(slot)}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd pool(cfg.candidate_pool, dim);
  for (Eigen::Index i = 0; i < pool.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) pool(i, j) = unit(rng);
  return pool;
}

namespace detail {

struct Scored {
  Eigen::RowVectorXd x;
  double score = -std::numeric_limits<double>::infinity();
};

// Coordinate-wise golden-section search around a start point, spending at
// most `budget` acquisition evaluations. The search radius halves after
// each sweep over the coordinates.
inline Scored refine_golden(const NehviEvaluator& eval, Scored start, int slot, int budget) {
  constexpr double kInvPhi = 0.6180339887498949;
  constexpr int kStepsPerLine = 4;
  const Eigen::Index d = start.x.size();
  double radius = 0.1;
  int used = 0;
  auto score_at = [&](const Eigen::RowVectorXd& x) {
    ++used;
    return eval.evaluate(x, slot).log_value;
  };
  while (used + kStepsPerLine + 2 <= budget) {
    for (Eigen::Index k = 0; k < d && used + kStepsPerLine + 2 <= budget; ++k) {
      double lo = std::max(0.0, start.x[k] - radius);
      double hi = std::min(1.0, start.x[k] + radius);
      Eigen::RowVectorXd probe = start.x;
      double c = hi - kInvPhi * (hi - lo);
      double e = lo + kInvPhi * (hi - lo);
      probe[k] = c;
      double fc = score_at(probe);
      probe[k] = e;
      double fe = score_at(probe);
      for (int it = 0; it < kStepsPerLine; ++it) {
        if (fc >= fe) {
          hi = e;
          e = c;
          fe = fc;
          c = hi - kInvPhi * (hi - lo);
          probe[k] = c;
          fc = score_at(probe);
        } else {
          lo = c;
          c = e;
          fc = fe;
          e = lo + kInvPhi * (hi - lo);
          probe[k] = e;
          fe = score_at(probe);
        }
      }
      const bool take_c = fc >= fe;
      const double best_f = take_c ? fc : fe;
      if (best_f > start.score) {
        start.x[k] = take_c ? c : e;
        start.score = best_f;
      }
    }
    radius *= 0.5;
  }
  return start;
}

inline double unit_distance(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) { return (a - b).norm(); }

}  // namespace detail

/// Sequential-greedy batch construction in the unit cube. Each slot takes the
/// best candidate from a random pool plus golden-section refinement of the
/// top pool entries, then folds it into the baseline as a pending point.
/// Returns q rows in unit-cube coordinates.
inline Eigen::MatrixXd suggest_batch_unit(const std::vector<const surrogate::GpModel*>& models,
                                          const ReferencePoint& ref, const AcquisitionConfig& cfg) {
  cfg.validate();
  require(!models.empty(), "suggest_batch: no models");
  for (const auto* m : models) require(m != nullptr && m->size() >= 1, "suggest_batch: untrained model");
  const Eigen::Index d = models.front()->dim();
  NehviEvaluator evaluator(models, models.front()->inputs(), ref, cfg);

  Eigen::MatrixXd chosen(cfg.q, d);
  for (int slot = 0; slot < cfg.q; ++slot) {
    const Eigen::MatrixXd pool = candidate_pool(d, cfg, slot);
    const auto scores = evaluator.evaluate_many(pool, slot);

    auto far_enough = [&](const Eigen::RowVectorXd& x) {
      for (int j = 0; j < slot; ++j)
        if (detail::unit_distance(x, chosen.row(j)) < cfg.min_distance) return false;
      return true;
    };

    std::vector<Eigen::Index> order(static_cast<std::size_t>(pool.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return scores[static_cast<std::size_t>(a)].log_value > scores[static_cast<std::size_t>(b)].log_value;
    });

    detail::Scored best;
    int refined = 0;
    for (Eigen::Index idx : order) {
      detail::Scored cand{pool.row(idx), scores[static_cast<std::size_t>(idx)].log_value};
      if (!far_enough(cand.x)) continue;
      if (refined < cfg.refine_top && cfg.refine_iters > 0) {
        detail::Scored r = detail::refine_golden(evaluator, cand, slot, cfg.refine_iters);
        if (far_enough(r.x)) cand = std::move(r);
        ++refined;
      }
      if (cand.score > best.score) best = std::move(cand);
      if (refined >= cfg.refine_top || cfg.refine_iters == 0) break;
    }
    if (best.x.size() == 0) throw NumericalError("suggest_batch: every candidate was rejected as a duplicate");
    chosen.row(slot) = best.x;
    if (slot + 1 < cfg.q) evaluator.add_pending(best.x, slot);
  }
  return chosen;
}

/// Suggest q parameter sets within bounds for the next batch.
inline std::vector<ParameterSet> suggest_batch(const std::vector<const surrogate::GpModel*>& models,
                                               const ParameterBounds& bounds, const ReferencePoint& ref,
                                               const AcquisitionConfig& cfg) {
  bounds.validate();
  require(!models.empty() && models.front()->dim() == static_cast<Eigen::Index>(kParameterCount),
          "suggest_batch: models must be trained on the four process parameters");
  for (const auto* m : models)
    require(m->input_bounds() == surrogate::to_intervals(bounds), "suggest_batch: model bounds differ from campaign bounds");
  const Eigen::MatrixXd unit = suggest_batch_unit(models, ref, cfg);
  std::vector<ParameterSet> out;
  out.reserve(static_cast<std::size_t>(unit.rows()));
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    std::array<double, kParameterCount> u{};
    for (std::size_t k = 0; k < kParameterCount; ++k)
      u[k] = std::clamp(unit(i, static_cast<Eigen::Index>(k)), 0.0, 1.0);
    ParameterSet p = bounds.denormalize(u);
    // Guard against rounding just past an edge.
    const auto b = bounds.to_array();
    auto v = p.to_array();
    for (std::size_t k = 0; k < kParameterCount; ++k) v[k] = std::clamp(v[k], b[k].lo, b[k].hi);
    out.push_back(ParameterSet::from_array(v));
  }
  return out;
}

}  // namespace sdl::acquisition

#endif
