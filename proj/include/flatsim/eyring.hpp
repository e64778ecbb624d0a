#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "flatsim/landscape.hpp"

namespace flatsim {

/// Axis-aligned box in parameter space (one or two dimensions).
struct Region {
  std::vector<std::array<double, 2>> bounds;  // {lo, hi} per axis

  int dimension() const { return static_cast<int>(bounds.size()); }
  double volume() const;
  void validate() const;
};

using EnergyFn = std::function<double(std::span<const double>)>;

/// F = -log(integral of exp(-beta E) over the region) / beta, with a grid-refinement
/// convergence diagnostic: refinement_delta = |F at half resolution - value|.
struct FreeEnergyValue {
  double value = 0.0;
  double beta = 0.0;
  int resolution = 0;  // quadrature nodes per axis used for `value`
  double refinement_delta = 0.0;
};

/// Tensor-grid trapezoid quadrature; evaluates at `resolution` and at double that
/// resolution and reports the finer value. Shift-stabilized against underflow.
FreeEnergyValue free_energy(const Region& region, const EnergyFn& energy, double beta,
                            int resolution = 1024);

/// Transition-rate factor exp(-beta (f_saddle - f_well)); overflow clamps to the
/// largest finite double.
double eyring_rate_factor(double f_saddle, double f_well, double beta);

/// Box of +-half_widths landscape widths around a well center.
Region well_box(const Landscape& land, std::size_t well, double half_widths = 3.0);

/// Monte-Carlo mean first-passage time out of a well: seeded diffusion runs started
/// at the well center, stopped on first entry into any other well's vicinity.
/// Trajectories reflect off the landscape's bounding box (centers +- 3 widths),
/// keeping the passage time finite on an otherwise unconfined landscape.
struct EscapeStats {
  double mfpt_mean = 0.0;  // over escaped runs only
  double mfpt_se = 0.0;
  int runs = 0;
  int escaped = 0;
  bool censored = false;  // fewer than 90% of runs escaped within max_steps
};

EscapeStats empirical_escape_rate(const Landscape& land, std::size_t well, double theta,
                                  int runs, long max_steps, double dt, std::uint64_t seed);

}  // namespace flatsim
