#ifndef SDL_CAMPAIGN_METRICS_HPP
#define SDL_CAMPAIGN_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "sdl/acquisition/hypervolume.hpp"
#include "sdl/domain.hpp"
#include "sdl/error.hpp"
#include "sdl/pareto.hpp"

namespace sdl::campaign {

/// All replicates of one (batch, parameter set) pair, summarized.
struct PairSummary {
  int batch_index = 0;
  int param_set_index = 0;
  ParameterSet params;
  ObjectiveVector midpoint;  // replicate mean
  ObjectiveVector spread;    // half of the replicate range
  double total_defect_spread = 0.0;
  std::vector<std::int64_t> sample_ids;
};

/// Groups records by (batch, set) in order of first appearance.
inline std::vector<PairSummary> summarize_pairs(const std::vector<SampleRecord>& records) {
  std::vector<PairSummary> pairs;
  std::map<std::pair<int, int>, std::size_t> index;
  std::vector<std::vector<ObjectiveVector>> values;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.batch_index, r.param_set_index);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, pairs.size()).first;
      PairSummary p;
      p.batch_index = r.batch_index;
      p.param_set_index = r.param_set_index;
      p.params = r.params;
      pairs.push_back(p);
      values.emplace_back();
    }
    pairs[it->second].sample_ids.push_back(r.sample_id);
    values[it->second].push_back(r.objectives);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& v = values[i];
    double od = 0, b = 0, d = 0;
    double od_lo = v[0].optical_density, od_hi = od_lo;
    double b_lo = v[0].defect_bright, b_hi = b_lo;
    double d_lo = v[0].defect_dark, d_hi = d_lo;
    double t_lo = v[0].defect_total(), t_hi = t_lo;
    for (const auto& o : v) {
      od += o.optical_density;
      b += o.defect_bright;
      d += o.defect_dark;
      od_lo = std::min(od_lo, o.optical_density);
      od_hi = std::max(od_hi, o.optical_density);
      b_lo = std::min(b_lo, o.defect_bright);
      b_hi = std::max(b_hi, o.defect_bright);
      d_lo = std::min(d_lo, o.defect_dark);
      d_hi = std::max(d_hi, o.defect_dark);
      t_lo = std::min(t_lo, o.defect_total());
      t_hi = std::max(t_hi, o.defect_total());
    }
    const double n = static_cast<double>(v.size());
    pairs[i].midpoint = {od / n, b / n, d / n};
    pairs[i].spread = {(od_hi - od_lo) / 2, (b_hi - b_lo) / 2, (d_hi - d_lo) / 2};
    pairs[i].total_defect_spread = (t_hi - t_lo) / 2;
  }
  return pairs;
}

struct HypervolumeTrace {
  std::vector<double> per_pair;   // cumulative HV after each pair
  std::vector<int> pair_batch;    // batch of each pair
  std::vector<double> per_batch;  // HV at the end of each batch
};

/// Cumulative hypervolume of replicate midpoints after each pair.
inline HypervolumeTrace hypervolume_trace(const std::vector<SampleRecord>& records, ObjectiveMode mode,
                                          const ReferencePoint& ref) {
  require(!records.empty(), "hypervolume_trace: no completed samples");
  require(ref.size() == objective_count(mode), "hypervolume_trace: reference point length differs from mode");
  const auto pairs = summarize_pairs(records);
  HypervolumeTrace t;
  std::vector<double> rows;
  for (const auto& p : pairs) {
    const auto c = canonicalize(p.midpoint, mode);
    rows.insert(rows.end(), c.values.begin(), c.values.end());
    t.per_pair.push_back(acquisition::hypervolume_rows(rows, c.size(), ref.values));
    t.pair_batch.push_back(p.batch_index);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i + 1 == pairs.size() || t.pair_batch[i + 1] != t.pair_batch[i]) t.per_batch.push_back(t.per_pair[i]);
  }
  return t;
}

struct SpreadStats {
  double median = 0.0;
  double p05 = 0.0;
  double p95 = 0.0;
  std::size_t count = 0;
};

struct ReproducibilityStats {
  SpreadStats optical_density;
  SpreadStats defect_total;
  SpreadStats defect_bright;
  SpreadStats defect_dark;
};

/// Linear-interpolation percentile, q in [0, 1].
inline double percentile(std::vector<double> v, double q) {
  require(!v.empty(), "percentile: empty input");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline SpreadStats spread_stats(const std::vector<double>& v) {
  return {percentile(v, 0.5), percentile(v, 0.05), percentile(v, 0.95), v.size()};
}

/// Median and 5-95 % band of replicate half-differences |x1 - x2| / 2.
inline ReproducibilityStats reproducibility_stats(const std::vector<SampleRecord>& records) {
  require(!records.empty(), "reproducibility_stats: no samples");
  std::map<std::pair<int, int>, std::vector<const SampleRecord*>> groups;
  for (const auto& r : records) groups[{r.batch_index, r.param_set_index}].push_back(&r);
  std::vector<double> od, total, bright, dark;
  for (const auto& [key, g] : groups) {
    if (g.size() != 2)
      throw ValidationError("reproducibility_stats: every parameter set needs exactly two replicates");
    const auto& a = g[0]->objectives;
    const auto& b = g[1]->objectives;
    od.push_back(std::abs(a.optical_density - b.optical_density) / 2);
    total.push_back(std::abs(a.defect_total() - b.defect_total()) / 2);
    bright.push_back(std::abs(a.defect_bright - b.defect_bright) / 2);
    dark.push_back(std::abs(a.defect_dark - b.defect_dark) / 2);
  }
  return {spread_stats(od), spread_stats(total), spread_stats(bright), spread_stats(dark)};
}

struct BatchMean {
  int batch_index = 0;
  double optical_density = 0.0;
  double defect_total = 0.0;
  std::size_t count = 0;
};

inline std::vector<BatchMean> batch_means(const std::vector<SampleRecord>& records) {
  std::map<int, BatchMean> acc;
  for (const auto& r : records) {
    auto& m = acc[r.batch_index];
    m.batch_index = r.batch_index;
    m.optical_density += r.objectives.optical_density;
    m.defect_total += r.objectives.defect_total();
    ++m.count;
  }
  std::vector<BatchMean> out;
  for (auto& [b, m] : acc) {
    m.optical_density /= static_cast<double>(m.count);
    m.defect_total /= static_cast<double>(m.count);
    out.push_back(m);
  }
  return out;
}

/// Indices (into `pairs`) of the Pareto front among pairs with batch <= last_batch.
inline std::vector<std::size_t> cumulative_front(const std::vector<PairSummary>& pairs, int last_batch,
                                                 ObjectiveMode mode) {
  std::vector<CanonicalObjectives> pts;
  std::vector<std::size_t> map;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].batch_index > last_batch) continue;
    pts.push_back(canonicalize(pairs[i].midpoint, mode));
    map.push_back(i);
  }
  if (pts.empty()) return {};
  std::vector<std::size_t> out;
  for (std::size_t k : pareto_front(pts)) out.push_back(map[k]);
  return out;
}

/// Sample ids of every replicate of a pair on the cumulative front.
inline std::vector<std::int64_t> pareto_member_ids(const std::vector<SampleRecord>& records, ObjectiveMode mode) {
  if (records.empty()) return {};
  const auto pairs = summarize_pairs(records);
  int last = 0;
  for (const auto& p : pairs) last = std::max(last, p.batch_index);
  std::vector<std::int64_t> ids;
  for (std::size_t i : cumulative_front(pairs, last, mode))
    ids.insert(ids.end(), pairs[i].sample_ids.begin(), pairs[i].sample_ids.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace sdl::campaign

#endif
