#ifndef SDL_PARETO_HPP
#define SDL_PARETO_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "sdl/domain.hpp"
#include "sdl/error.hpp"

namespace sdl {

// Raw-span variants are used by the hypervolume and acquisition inner loops.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly = true;
  }
  return strictly;
}

inline bool dominates(const CanonicalObjectives& a, const CanonicalObjectives& b) {
  require(a.size() == b.size(), "dominates: objective vectors differ in length");
  return dominates(std::span<const double>(a.values), std::span<const double>(b.values));
}

/// Indices of the non-dominated points, ascending. Duplicates of a front
/// point are all kept since equal vectors do not dominate each other.
inline std::vector<std::size_t> pareto_front(const std::vector<CanonicalObjectives>& points) {
  require(!points.empty(), "pareto_front: empty input");
  const std::size_t m = points.front().size();
  for (const auto& p : points) require(p.size() == m, "pareto_front: objective vectors differ in length");

  // Sweep in lexicographically descending order: a point can only be
  // dominated by points that sort before it.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].values > points[b].values;
  });

  std::vector<std::size_t> front;
  for (std::size_t idx : order) {
    bool dominated = false;
    for (std::size_t f : front) {
      if (dominates(points[f], points[idx])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(idx);
  }
  std::sort(front.begin(), front.end());
  return front;
}

}  // namespace sdl

#endif
