#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "flatsim/landscape.hpp"
#include "flatsim/rng.hpp"

namespace flatsim {

/// Noisy hill-climbing configuration: ascent steps x += alpha * grad L + xi with
/// xi ~ N(0, T (1+k)^{-1/2}) per coordinate at iteration k (decaying schedule).
struct SgldConfig {
  double learning_rate = 0.05;
  double temperature = 0.0;  // T >= 0; 0 gives deterministic ascent
  long max_iterations = 2000;
  long capture_patience = 50;  // consecutive in-vicinity iterations that count as capture
  std::vector<double> x0;
  long record_stride = 0;  // 0 keeps no trajectory; s > 0 records every s-th iterate

  void validate(const Landscape& land) const;
};

struct SgldRunResult {
  std::optional<std::size_t> captured_well;
  std::optional<long> capture_iteration;  // iteration that completed the patience streak
  long iterations = 0;                    // update steps actually taken
  bool diverged = false;                  // non-finite iterate; never counts as capture
  std::vector<double> final_x;
  std::vector<std::vector<double>> trajectory;  // recorded iterates when stride > 0
};

/// One seeded run; stops at capture, divergence, or max_iterations.
SgldRunResult sgld_run(const Landscape& land, const SgldConfig& config, RngStream& rng);

/// One temperature's capture tally. `fraction` = captured-at-widest / captured-anywhere;
/// it is undefined (defined=false) when no run was captured.
struct FractionPoint {
  double temperature = 0.0;
  long captured_wide = 0;
  long captured_any = 0;
  long total_runs = 0;
  bool defined = false;
  double fraction = 0.0;
};

/// Runs `runs_per_temperature` seeded walks per entry of `temperatures`. Run r of
/// temperature index t uses RngStream(seed, t * runs_per_temperature + r).
std::vector<FractionPoint> wide_well_fraction(const Landscape& land, const SgldConfig& base,
                                              const std::vector<double>& temperatures,
                                              long runs_per_temperature, std::uint64_t seed);

/// Cumulative capture curve for one noise scale: fraction[k] = share of runs whose
/// capture iteration is <= k, for k = 0..max_iterations.
struct CaptureCurve {
  double noise_scale = 0.0;
  std::vector<double> fraction;  // length max_iterations + 1, nondecreasing
};

/// Curves for a list of noise scales (used directly as the temperature T).
/// Run r of scale index s uses RngStream(seed, s * runs + r).
std::vector<CaptureCurve> capture_fraction_vs_iteration(const Landscape& land,
                                                        const SgldConfig& base,
                                                        const std::vector<double>& noise_scales,
                                                        long runs, std::uint64_t seed);

}  // namespace flatsim
