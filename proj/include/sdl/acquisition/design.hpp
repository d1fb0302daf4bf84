#ifndef SDL_ACQUISITION_DESIGN_HPP
#define SDL_ACQUISITION_DESIGN_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "sdl/domain.hpp"
#include "sdl/error.hpp"
#include "sdl/random.hpp"

namespace sdl::acquisition {

/// Latin-hypercube design: each dimension's `count` values fall into
/// `count` distinct equal-width strata.
inline std::vector<ParameterSet> initial_design(const ParameterBounds& bounds, int count, std::uint64_t seed) {
  require(count >= 1, "initial_design: count must be >= 1");
  bounds.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<std::size_t>(count);

  std::array<std::vector<double>, kParameterCount> columns;
  for (auto& col : columns) {
    std::vector<std::size_t> strata(n);
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    col.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double u = (static_cast<double>(strata[i]) + unit(rng)) / static_cast<double>(n);
      col[i] = std::min(u, std::nextafter(1.0, 0.0));
    }
  }

  std::vector<ParameterSet> design;
  design.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, kParameterCount> u{};
    for (std::size_t k = 0; k < kParameterCount; ++k) u[k] = columns[k][i];
    design.push_back(bounds.denormalize(u));
  }
  return design;
}

}  // namespace sdl::acquisition

#endif
