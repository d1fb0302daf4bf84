#ifndef SDL_ACQUISITION_HYPERVOLUME_HPP
#define SDL_ACQUISITION_HYPERVOLUME_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sdl/domain.hpp"
#include "sdl/error.hpp"

namespace sdl::acquisition {

struct HypervolumeProblem {
  std::vector<CanonicalObjectives> front;
  ReferencePoint ref;
};

namespace detail {

using Point2 = std::array<double, 2>;
using Point3 = std::array<double, 3>;

// Points must already be strictly better than ref in both coordinates.
inline double hv2_sorted_sweep(std::vector<Point2>& pts, const Point2& ref) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a[0] != b[0] ? a[0] > b[0] : a[1] > b[1];
  });
  double area = 0.0;
  double y_best = ref[1];
  for (const auto& p : pts) {
    if (p[1] > y_best) {
      area += (p[0] - ref[0]) * (p[1] - y_best);
      y_best = p[1];
    }
  }
  return area;
}

// Sweep down the third coordinate, accumulating slab volumes of the 2-D
// staircase formed by every point above the slab.
inline double hv3_sweep(std::vector<Point3>& pts, const Point3& ref) {
  if (pts.empty()) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const Point3& a, const Point3& b) { return a[2] > b[2]; });
  std::vector<Point2> stair;
  stair.reserve(pts.size());
  const Point2 ref2{ref[0], ref[1]};
  double volume = 0.0;
  std::vector<Point2> scratch;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point2 q{pts[i][0], pts[i][1]};
    // Keep the staircase minimal: skip q if weakly dominated, drop what q dominates.
    bool covered = false;
    for (const auto& s : stair) {
      if (s[0] >= q[0] && s[1] >= q[1]) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      std::erase_if(stair, [&](const Point2& s) { return q[0] >= s[0] && q[1] >= s[1]; });
      stair.push_back(q);
    }
    const double next_z = i + 1 < pts.size() ? pts[i + 1][2] : ref[2];
    const double height = pts[i][2] - next_z;
    if (height > 0.0) {
      scratch = stair;
      volume += height * hv2_sorted_sweep(scratch, ref2);
    }
  }
  return volume;
}

}  // namespace detail

/// Exact hypervolume of points given as contiguous rows of length m
/// (m = 2 or 3) in maximization convention. Points that do not strictly
/// exceed the reference in every coordinate contribute nothing.
inline double hypervolume_rows(std::span<const double> rows, std::size_t m, std::span<const double> ref) {
  require(m == 2 || m == 3, "hypervolume: only 2 or 3 objectives are supported");
  require(ref.size() == m, "hypervolume: reference point length differs from objective count");
  const std::size_t n = rows.size() / m;
  if (m == 2) {
    std::vector<detail::Point2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = rows.data() + i * 2;
      if (p[0] > ref[0] && p[1] > ref[1]) pts.push_back({p[0], p[1]});
    }
    return detail::hv2_sorted_sweep(pts, {ref[0], ref[1]});
  }
  std::vector<detail::Point3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = rows.data() + i * 3;
    if (p[0] > ref[0] && p[1] > ref[1] && p[2] > ref[2]) pts.push_back({p[0], p[1], p[2]});
  }
  return detail::hv3_sweep(pts, {ref[0], ref[1], ref[2]});
}

inline double hypervolume(const HypervolumeProblem& problem) {
  const std::size_t m = problem.ref.size();
  require(m == 2 || m == 3, "hypervolume: only 2 or 3 objectives are supported");
  for (double r : problem.ref.values) require(std::isfinite(r), "hypervolume: reference point must be finite");
  std::vector<double> rows;
  rows.reserve(problem.front.size() * m);
  for (const auto& p : problem.front) {
    require(p.size() == m, "hypervolume: point length differs from reference point length");
    rows.insert(rows.end(), p.values.begin(), p.values.end());
  }
  return hypervolume_rows(rows, m, problem.ref.values);
}

}  // namespace sdl::acquisition

#endif
