#include "flatsim/eyring.hpp"

#include <cmath>
#include <limits>

#include "flatsim/common.hpp"
#include "flatsim/rng.hpp"
#include "flatsim/sde.hpp"
#include "flatsim/stats.hpp"

namespace flatsim {

double Region::volume() const {
  validate();
  double v = 1.0;
  for (const auto& b : bounds) v *= b[1] - b[0];
  return v;
}

void Region::validate() const {
  require(dimension() == 1 || dimension() == 2, "Region: one or two dimensions supported");
  for (const auto& b : bounds)
    require(std::isfinite(b[0]) && std::isfinite(b[1]) && b[1] > b[0],
            "Region: bounds must be finite with hi > lo");
}

namespace {

// log of the trapezoid integral of exp(-beta E) with n nodes per axis,
// stabilized by shifting out the minimum sampled energy.
double log_integral(const Region& region, const EnergyFn& energy, double beta, int n) {
  const int d = region.dimension();
  std::vector<double> values;
  values.reserve(d == 1 ? n : static_cast<std::size_t>(n) * n);
  double x[2];
  double emin = std::numeric_limits<double>::infinity();
  auto sample = [&](std::span<const double> p) {
    const double e = energy(p);
    require(std::isfinite(e), "free_energy: energy must be finite on the region");
    emin = std::min(emin, e);
    values.push_back(e);
  };
  if (d == 1) {
    const double h = (region.bounds[0][1] - region.bounds[0][0]) / (n - 1);
    for (int i = 0; i < n; ++i) {
      x[0] = region.bounds[0][0] + i * h;
      sample(std::span<const double>(x, 1));
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      s += w * std::exp(-beta * (values[i] - emin));
    }
    return -beta * emin + std::log(s * h);
  }
  const double hx = (region.bounds[0][1] - region.bounds[0][0]) / (n - 1);
  const double hy = (region.bounds[1][1] - region.bounds[1][0]) / (n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      x[0] = region.bounds[0][0] + i * hx;
      x[1] = region.bounds[1][0] + j * hy;
      sample(std::span<const double>(x, 2));
    }
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = ((i == 0 || i == n - 1) ? 0.5 : 1.0) *
                       ((j == 0 || j == n - 1) ? 0.5 : 1.0);
      s += w * std::exp(-beta * (values[static_cast<std::size_t>(i) * n + j] - emin));
    }
  return -beta * emin + std::log(s * hx * hy);
}

}  // namespace

FreeEnergyValue free_energy(const Region& region, const EnergyFn& energy, double beta,
                            int resolution) {
  region.validate();
  require(std::isfinite(beta) && beta > 0.0, "free_energy: beta must be positive");
  require(resolution >= 9, "free_energy: resolution must be >= 9 nodes per axis");
  const double coarse = -log_integral(region, energy, beta, resolution) / beta;
  const double fine = -log_integral(region, energy, beta, 2 * resolution) / beta;
  require(std::isfinite(fine) && std::isfinite(coarse),
          "free_energy: integral underflowed or overflowed; rescale beta or the energy");
  FreeEnergyValue out;
  out.value = fine;
  out.beta = beta;
  out.resolution = 2 * resolution;
  out.refinement_delta = std::abs(fine - coarse);
  return out;
}

double eyring_rate_factor(double f_saddle, double f_well, double beta) {
  require(std::isfinite(beta) && beta > 0.0, "eyring_rate_factor: beta must be positive");
  require(std::isfinite(f_saddle) && std::isfinite(f_well),
          "eyring_rate_factor: free energies must be finite");
  const double rate = std::exp(-beta * (f_saddle - f_well));
  if (rate == std::numeric_limits<double>::infinity())
    return std::numeric_limits<double>::max();
  return rate;
}

Region well_box(const Landscape& land, std::size_t well, double half_widths) {
  require(well < land.well_count(), "well_box: well index out of range");
  require(std::isfinite(half_widths) && half_widths > 0.0,
          "well_box: half_widths must be positive");
  const auto& w = land.well(well);
  Region region;
  region.bounds.reserve(w.center.size());
  for (double c : w.center)
    region.bounds.push_back({c - half_widths * w.width, c + half_widths * w.width});
  region.validate();
  return region;
}

EscapeStats empirical_escape_rate(const Landscape& land, std::size_t well, double theta,
                                  int runs, long max_steps, double dt, std::uint64_t seed) {
  require(well < land.well_count(), "empirical_escape_rate: well index out of range");
  require(land.well_count() >= 2, "empirical_escape_rate: need a second well to escape into");
  require(std::isfinite(theta) && theta > 0.0, "empirical_escape_rate: theta must be > 0");
  require(runs >= 1, "empirical_escape_rate: runs must be >= 1");
  require(max_steps >= 1, "empirical_escape_rate: max_steps must be >= 1");
  require(std::isfinite(dt) && dt > 0.0, "empirical_escape_rate: dt must be positive");

  const DriftField drift{land.dimension(),
                         [&land](std::span<const double> x, double, std::span<double> out) {
                           land.gradient(x, out);
                         }};
  // Reflecting outer box (centers +- 3 widths, unioned across wells): escape times
  // over an unconfined tail-free landscape would otherwise diverge with the horizon.
  const int d = land.dimension();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < land.well_count(); ++j) {
    const auto& w = land.well(j);
    for (int a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], w.center[a] - 3.0 * w.width);
      hi[a] = std::max(hi[a], w.center[a] + 3.0 * w.width);
    }
  }
  auto reflect = [&](std::span<double> x) {
    for (int a = 0; a < d; ++a) {
      while (x[a] < lo[a] || x[a] > hi[a]) {
        if (x[a] < lo[a]) x[a] = 2.0 * lo[a] - x[a];
        if (x[a] > hi[a]) x[a] = 2.0 * hi[a] - x[a];
      }
    }
  };
  std::vector<double> times;
  times.reserve(runs);
  for (int r = 0; r < runs; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    std::vector<double> x = land.well(well).center;
    for (long k = 1; k <= max_steps; ++k) {
      euler_maruyama_step(x, drift, theta, dt, static_cast<double>(k - 1) * dt, rng);
      reflect(x);
      const auto member = land.membership(x);
      if (member.has_value() && *member != well) {
        times.push_back(static_cast<double>(k) * dt);
        break;
      }
    }
  }
  EscapeStats stats;
  stats.runs = runs;
  stats.escaped = static_cast<int>(times.size());
  stats.censored = stats.escaped < static_cast<int>(std::ceil(0.9 * runs));
  if (!times.empty()) stats.mfpt_mean = mean(times);
  if (times.size() >= 2) stats.mfpt_se = standard_error(times);
  return stats;
}

}  // namespace flatsim
