#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flatsim/landscape.hpp"

namespace flatsim {

/// Short-range repulsion felt by the prey plus the predator's pursuit speed.
/// The repulsion magnitude is push_strength / (1 + e^{push_sharpness (d -
/// push_range)}) + yukawa_strength * e^{-yukawa_decay d} / d, strictly
/// decreasing in the separation d.
struct InteractionParams {
  double push_strength = 0.3;     // plateau of the sigmoid shoulder
  double push_range = 1.0;        // distance where the shoulder rolls off
  double push_sharpness = 1e3;    // sigmoid steepness
  double yukawa_strength = 10.0;  // short-range core strength
  double yukawa_decay = 10.0;     // inverse range of the core
  double pursuit_speed = 0.15;    // predator speed toward the prey

  /// All fields nonnegative and finite; a moving predator (pursuit_speed > 0)
  /// must be slower than the repulsion plateau so the prey can hold a gap.
  void validate() const;
};

/// Repulsion magnitude at separation d > 0.
double interaction_magnitude(double d, const InteractionParams& p);

/// Force on the prey along delta = prey - predator. Separations below 1e-9
/// evaluate at 1e-9 and push along the first coordinate axis; `coincident`
/// (when non-null) reports that the fallback fired.
std::vector<double> interaction_force(std::span<const double> delta,
                                      const InteractionParams& p,
                                      bool* coincident = nullptr);

/// Predator velocity: magnitude exactly pursuit_speed, pointing at the prey.
/// Same coincidence fallback as interaction_force.
std::vector<double> pursuit_force(std::span<const double> delta, double pursuit_speed,
                                  bool* coincident = nullptr);

struct PursuitConfig {
  std::vector<double> prey_start;
  std::vector<double> predator_start;
  InteractionParams interaction;
  double dt = 1e-3;
  std::int64_t steps = 80000;
  std::int64_t record_stride = 20;

  void validate(const Landscape& land) const;
};

struct PursuitSample {
  double time = 0.0;
  std::vector<double> prey;
  std::vector<double> predator;
  double separation = 0.0;
  double objective = 0.0;  // landscape value at the prey
};

struct PursuitTrajectory {
  std::vector<PursuitSample> samples;
  bool truncated = false;            // non-finite state; run stopped early
  bool step_limit_exceeded = false;  // a prey step exceeded half the narrowest width
  bool coincidence = false;          // separation hit the 1e-9 floor at least once
};

/// Deterministic explicit-Euler pursuit: the prey ascends the landscape while
/// repelled from the predator; the predator closes at constant speed.
PursuitTrajectory pursuit_run(const Landscape& land, const PursuitConfig& cfg);

enum class PursuitRegime { Pushout, Oscillation, Escape, Unsettled };

struct RegimeReport {
  PursuitRegime label = PursuitRegime::Unsettled;
  int source_well = -1;    // earlier captured well when the label is Pushout
  int terminal_well = -1;  // well hosting the terminal window (Pushout/Oscillation)
  double window_amplitude = 0.0;
  int window_sign_changes = 0;
  double separation_p5 = 0.0;
  double separation_p95 = 0.0;
};

/// Classify the final 20% of the recorded samples (at least 10 of them):
/// Oscillation(k) when every window sample sits within 3 widths of well k and
/// the detrended distance-to-center shows >= 2 sign changes (waived below
/// amplitude 1e-6); Pushout(j -> k) when an earlier sample was captured by a
/// different well j; Escape when the window clears every 3-width vicinity.
RegimeReport classify_regime(const PursuitTrajectory& traj, const Landscape& land);

struct LimitCycleSolution {
  bool feasible = false;
  double prey_radius = 0.0;      // orbit radius of the prey
  double predator_radius = 0.0;  // orbit radius of the predator
  double separation = 0.0;       // prey-predator distance on the cycle
  double residual[3] = {0.0, 0.0, 0.0};
};

/// Steady circular pursuit around one radial well of peak height `depth` and
/// width `width`: radii ratio matches the speed ratio, the well's pull matches
/// the repulsion, and the triangle closes at the given prey-side angle. Solved
/// by damped Newton from a grid scan; an empty scan reports infeasible rather
/// than throwing.
LimitCycleSolution limiting_oscillation(double depth, double width,
                                        const InteractionParams& p, double angle);

}  // namespace flatsim
