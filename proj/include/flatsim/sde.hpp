#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flatsim/rng.hpp"

namespace flatsim {

/// Time-dependent drift b(x, t) with a declared dimension.
struct DriftField {
  int dimension = 0;
  std::function<void(std::span<const double> x, double t, std::span<double> out)> eval;
};

/// One explicit Euler-Maruyama update: x += b(x,t) dt + sqrt(2 theta dt) xi.
/// Zero-temperature steps consume no randomness. Throws SimulationFault if the
/// drift evaluates to a non-finite value.
void euler_maruyama_step(std::span<double> x, const DriftField& drift, double theta,
                         double dt, double t, RngStream& rng);

/// Scalar potential sampled on grid nodes.
using PotentialFn = std::function<double(std::span<const double>)>;

/// Uniform node-centered grid in one or two dimensions.
struct GridSpec {
  std::vector<std::array<double, 2>> bounds;  // {lo, hi} per axis
  std::vector<int> nodes;                     // node count per axis, >= 3

  int dimension() const { return static_cast<int>(bounds.size()); }
  double spacing(int axis) const {
    return (bounds[axis][1] - bounds[axis][0]) / (nodes[axis] - 1);
  }
  double coord(int axis, int i) const { return bounds[axis][0] + i * spacing(axis); }
  std::size_t size() const;
  void validate() const;
};

/// Density values on grid nodes; integrals use trapezoid weights (half-weight
/// boundary nodes). Row-major layout for two dimensions.
class DensityGrid {
 public:
  explicit DensityGrid(GridSpec spec);

  const GridSpec& grid() const { return spec_; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  double& at(int i) { return v_[i]; }
  double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * spec_.nodes[1] + j]; }
  double at(int i) const { return v_[i]; }
  double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * spec_.nodes[1] + j]; }

  /// Trapezoid volume element of node `flat`.
  double node_weight(std::size_t flat) const;

  double mass() const;

  /// Scale to unit mass; rejects non-positive or non-finite mass.
  void normalize();

  double moment_mean(int axis) const;
  double moment_variance(int axis) const;

  /// Integral L1 distance (trapezoid-weighted) between densities on equal grids.
  double l1_distance(const DensityGrid& other) const;

  /// CSV rows "x[,y],density" after the given comment lines (each written as "# ...").
  void write_csv(std::ostream& os, std::span<const std::string> comments) const;

 private:
  GridSpec spec_;
  std::vector<double> v_;
};

/// Normalized exp(-beta f)/Z on the grid (trapezoid Z, shift-stabilized).
DensityGrid make_gibbs_density(const GridSpec& spec, const PotentialFn& f, double beta);

/// Largest admissible explicit time step: min_axis(h)^2 / (4 theta).
double fokker_planck_step_limit(const GridSpec& spec, double theta);

/// Explicit conservative evolution of du/dt = theta*Lap(u) + grad(u).grad(f) + u*Lap(f)
/// with zero-flux boundaries, discretized so the grid Gibbs density exp(-f/theta)/Z is
/// stationary to rounding and mass is conserved exactly. Rejects dt above the step limit.
void fokker_planck_evolve(DensityGrid& u, const PotentialFn& f, double theta, double dt,
                          long steps);

}  // namespace flatsim
