#pragma once

// Deterministic near-uniform point sets on the unit sphere (golden-angle
// Fibonacci lattice), plus the nested refinement batches used by the grid
// linear programs.

#include "spinclass/angular.hpp"

#include <algorithm>
#include <vector>

namespace spinclass {

struct SphereGrid {
  std::vector<Direction> points;

  int size() const { return static_cast<int>(points.size()); }
};

inline constexpr double kGoldenAngle = 2.39996322972865332;  // pi (3 - sqrt 5)

namespace detail {

// Golden-angle spiral of n points; z runs from the north pole down.
// phi_offset decorrelates batches appended by nested refinement.
inline void append_spiral(SphereGrid& grid, int n, double phi_offset) {
  if (n < 1) throw std::invalid_argument("append_spiral: n >= 1 required");
  for (int i = 0; i < n; ++i) {
    const double z =
        (n == 1) ? 1.0 : 1.0 - 2.0 * static_cast<double>(i) / (n - 1);
    double phi = std::fmod(kGoldenAngle * i + phi_offset, 2.0 * kPi);
    if (phi < 0.0) phi += 2.0 * kPi;
    Direction d;
    d.theta = std::acos(std::clamp(z, -1.0, 1.0));
    d.phi = (std::abs(z) >= 1.0) ? 0.0 : phi;
    grid.points.push_back(d);
  }
}

}  // namespace detail

inline SphereGrid fibonacci_grid(int n) {
  SphereGrid grid;
  grid.points.reserve(n);
  detail::append_spiral(grid, n, 0.0);
  return grid;
}

// Grows `grid` to `target` points by appending a fresh spiral with a
// level-dependent azimuth offset; existing points are untouched, so LP
// estimates over the grown grid stay monotone.
inline void grow_grid(SphereGrid& grid, int target, int level) {
  const int extra = target - grid.size();
  if (extra <= 0) return;
  detail::append_spiral(grid, extra, 0.754877666 * level + 0.5 * level * level);
}

}  // namespace spinclass
