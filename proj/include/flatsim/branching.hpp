#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "flatsim/gan.hpp"
#include "flatsim/rng.hpp"

namespace flatsim {

enum class ParticleKind { Discriminator, Generator };

inline constexpr int kDiscriminatorDim = 4;
inline constexpr int kGeneratorDim = 2;

/// One diffusing walker. Discriminators carry (center, log_width, gain,
/// offset); generators carry (mean, log_sigma) -- the same coordinates as the
/// coupled-pair dynamics.
struct Particle {
  std::int64_t id = 0;
  ParticleKind kind = ParticleKind::Discriminator;
  std::vector<double> position;
  double birth_time = 0.0;
};

DiscriminatorParams as_discriminator(const Particle& p);
GeneratorParams as_generator(const Particle& p);

enum class PopulationEventType { Replicate, Die, ReplicationRefused };

struct PopulationEvent {
  double time = 0.0;
  PopulationEventType type = PopulationEventType::Replicate;
  ParticleKind kind = ParticleKind::Discriminator;
  std::int64_t particle_id = -1;
  std::int64_t child_id = -1;  // Replicate only
};

/// Two populations plus the event ledger; particle counts change only through
/// logged replicate/die events.
struct PopulationState {
  std::vector<Particle> discriminators;
  std::vector<Particle> generators;
  double time = 0.0;
  std::int64_t next_id = 0;
  std::vector<PopulationEvent> events;

  Particle& spawn_discriminator(const DiscriminatorParams& p);
  Particle& spawn_generator(const GeneratorParams& p);
  /// Position dimensions match kinds, ids are unique and below next_id.
  void validate() const;
};

/// Event-rate configuration. A zero scale disables that channel; with every
/// channel disabled the step reduces to independent Langevin walkers. The cap
/// bounds the total particle count by refusing further replications.
struct RateParams {
  double generator_death_rate = 0.25;
  double disc_replication_scale = 0.35;
  double disc_death_scale = 0.06;
  double gen_replication_scale = 0.015;
  std::int64_t population_cap = 10000;
  void validate() const;
};

/// Per-coordinate freeze flags; false pins a coordinate: no drift, no noise,
/// and no draw consumed. Lets experiments restrict motion to discriminator
/// centers and generator means.
struct MobilityMask {
  std::array<bool, kDiscriminatorDim> discriminator{true, true, true, true};
  std::array<bool, kGeneratorDim> generator{true, true};
};

/// Per-particle functionals. disc_data_term[a] is discriminator a's mean log
/// likelihood on the sample (<= 0). disc_generator_term[a] sums
/// E_gen[log(1-D_a)] over the generator population (<= 0), and
/// gen_generator_term[b] sums the same pair integral over the discriminator
/// population (<= 0); both are empty sums (zero) when the other population is
/// absent.
struct PopulationFunctionals {
  std::vector<double> disc_data_term;
  std::vector<double> disc_generator_term;
  std::vector<double> gen_generator_term;
};

PopulationFunctionals population_functionals(const PopulationState& state,
                                             std::span<const double> sample,
                                             const GanQuadrature& quad = {});

struct BranchingDiagnostics {
  double max_event_probability = 0.0;  // max rate*dt this step; > 0.1 strains thinning
  int replications = 0;
  int deaths = 0;
  int refused_replications = 0;
};

/// One population step. Every particle first takes an Euler-Maruyama move:
/// discriminators ascend the gradient of (data term + summed pair term),
/// generators descend the gradient of their summed pair term, and mobile
/// coordinates receive sqrt(2*temperature*dt) noise. Events then fire
/// independently with probability rate*dt evaluated at the moved positions:
///   discriminator replication  disc_replication_scale * exp(data term)
///   discriminator death        disc_death_scale * (-summed pair term)
///   generator replication      gen_replication_scale * (-summed pair term)
///   generator death            generator_death_rate (fixed)
/// Replication appends an exact copy of the parent's position under a fresh
/// id; children join at the end of the step and neither move nor branch within
/// it. Draw order: discriminator moves in container order (mobile coordinates
/// only, skipped entirely at temperature 0), then generator moves, then one
/// replicate draw and one death draw per particle (discriminators first);
/// draws are consumed only for strictly positive probabilities. Any
/// rate*dt >= 1 rejects the step with both state and rng restored. The cap
/// refuses (and logs) replications that would lift the pre-death census above
/// population_cap. A non-finite drift raises SimulationFault with nothing
/// consumed or changed.
BranchingDiagnostics branching_step(PopulationState& state, std::span<const double> sample,
                                    const RateParams& rates, double temperature, double dt,
                                    RngStream& rng, const GanQuadrature& quad = {},
                                    const MobilityMask& mask = {});

/// Discriminator headcount by nearest reference center (ties to the first).
struct PeakCensus {
  int near_first = 0;
  int near_second = 0;
};
PeakCensus discriminator_census(const PopulationState& state, double first_center,
                                double second_center);

/// Two-cluster benchmark: does predation drain the sharp likelihood peak?
/// Each run draws a sample with one tight and one broad cluster (point counts
/// chosen so the two likelihood peaks over the discriminator center have
/// roughly equal height) and evolves the discriminator population twice from
/// identical starts: once alone, once against generators. Only discriminator
/// centers and generator means move. The reported mass fraction is the
/// time-averaged share of discriminators nearest the tight peak over the final
/// measure_fraction of steps.
struct SuppressionConfig {
  double peak_separation = 3.0;
  double narrow_spread = 0.05;
  double wide_spread = 0.8;
  int narrow_points = 24;
  int wide_points = 40;
  double disc_log_width = std::log(0.35);
  double disc_gain = 4.0;
  double disc_offset = -2.0;
  double gen_log_sigma = std::log(0.3);
  int initial_discs_per_peak = 5;
  int initial_generators = 6;
  RateParams rates;
  double temperature = 0.01;
  double dt = 0.01;
  int steps = 2000;
  double measure_fraction = 0.25;
  int runs = 200;
  GanQuadrature quadrature{48, 8.0};
  void validate() const;
};

/// Two-cluster likelihood sample for a validated config: narrow_points draws
/// centered on the narrow peak (-separation/2) followed by wide_points on the
/// wide peak, consuming one normal per point.
std::vector<double> suppression_sample(const SuppressionConfig& cfg, RngStream& rng);

/// Starting population: initial_discs_per_peak discriminators per peak
/// (narrow/wide alternating) with the frozen shape, plus, when enabled,
/// initial_generators generators with means alternating narrow/wide.
PopulationState suppression_initial_state(const SuppressionConfig& cfg,
                                          bool with_generators);

/// Only discriminator centers and generator means move; shapes stay frozen.
MobilityMask suppression_mobility();

struct SuppressionSummary {
  int runs_requested = 0;
  int runs_used = 0;
  int excluded_runs = 0;  // discriminator extinction in either arm
  double baseline_narrow_fraction = 0.0;
  double baseline_standard_error = 0.0;
  double predated_narrow_fraction = 0.0;
  double predated_standard_error = 0.0;
  double mean_difference = 0.0;  // predated minus baseline, paired per run
  double paired_t = 0.0;
  bool suppressed_at_95 = false;  // one-sided paired t below -1.66 (n >= 100)
};

/// Runs paired baseline/predated arms per seed-indexed run; runs where either
/// arm loses every discriminator are excluded and counted. Streams: run r uses
/// (seed, 3r) for the sample, (seed, 3r+1) for the baseline arm, (seed, 3r+2)
/// for the predated arm.
SuppressionSummary narrow_peak_suppression_experiment(const SuppressionConfig& cfg,
                                                      std::uint64_t seed);

}  // namespace flatsim
