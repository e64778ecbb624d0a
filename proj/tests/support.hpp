#pragma once

#include <cmath>

#include "flatsim/landscape.hpp"

// Shared fixtures used across test binaries.
namespace testsup {

// Two-well plane used by the hill-climbing experiments: a wide, tall well far
// in the third quadrant and a narrow, shallow one near the start point.  The
// origin sits inside the narrow well's basin and the objective gradient there
// has small positive components, so a deterministic ascent from the origin
// drifts into the narrow well while noise can still kick a walker across.
inline flatsim::Landscape reference_two_well() {
  return flatsim::Landscape({
      {{-5.5, -5.5}, std::sqrt(3.0), 9.0},
      {{3.0, 3.0}, std::sqrt(1.5), 2.25},
  });
}

constexpr std::size_t kWideWell = 0;
constexpr std::size_t kNarrowWell = 1;

// 1D pair of equal-height wells with a 2:1 width ratio, used by the
// escape-rate experiments.  Index 0 is the wide well.
inline flatsim::Landscape escape_pair_1d(double sigma = 0.5, double q = 1.0,
                                         double half_gap = 2.5) {
  return flatsim::Landscape({
      {{-half_gap}, 2.0 * sigma, q},
      {{+half_gap}, sigma, q},
  });
}

}  // namespace testsup
