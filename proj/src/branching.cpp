#include "flatsim/branching.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "flatsim/common.hpp"
#include "flatsim/stats.hpp"

namespace flatsim {

namespace {

void require_sample(std::span<const double> sample) {
  require(!sample.empty(), "sample must contain at least one point");
  require(all_finite(sample), "sample points must be finite");
}

int kind_dimension(ParticleKind kind) {
  return kind == ParticleKind::Discriminator ? kDiscriminatorDim : kGeneratorDim;
}

// Pairwise functional tables: data[a] = mean log D_a over the sample,
// disc_pair[a] = sum_b E_b[log(1-D_a)], gen_pair[b] = sum_a E_b[log(1-D_a)].
struct PairTables {
  std::vector<double> disc_data;
  std::vector<double> disc_pair;
  std::vector<double> gen_pair;
};

PairTables pair_tables(const std::vector<DiscriminatorParams>& ds,
                       const std::vector<GeneratorParams>& gs,
                       std::span<const double> sample, const GanQuadrature& quad) {
  PairTables t;
  t.disc_data.assign(ds.size(), 0.0);
  t.disc_pair.assign(ds.size(), 0.0);
  t.gen_pair.assign(gs.size(), 0.0);
  for (std::size_t a = 0; a < ds.size(); ++a)
    t.disc_data[a] = gan_data_term(ds[a], sample);
  for (std::size_t a = 0; a < ds.size(); ++a) {
    for (std::size_t b = 0; b < gs.size(); ++b) {
      const double pair = gan_generator_term(ds[a], gs[b], quad);
      t.disc_pair[a] += pair;
      t.gen_pair[b] += pair;
    }
  }
  return t;
}

void compact(std::vector<Particle>& v, const std::vector<char>& dead) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!dead[i]) {
      if (w != i) v[w] = std::move(v[i]);
      ++w;
    }
  }
  v.resize(w);
}

}  // namespace

DiscriminatorParams as_discriminator(const Particle& p) {
  require(p.kind == ParticleKind::Discriminator && p.position.size() == kDiscriminatorDim,
          "particle is not a discriminator with a 4-coordinate position");
  return {p.position[0], p.position[1], p.position[2], p.position[3]};
}

GeneratorParams as_generator(const Particle& p) {
  require(p.kind == ParticleKind::Generator && p.position.size() == kGeneratorDim,
          "particle is not a generator with a 2-coordinate position");
  return {p.position[0], p.position[1]};
}

Particle& PopulationState::spawn_discriminator(const DiscriminatorParams& p) {
  discriminators.push_back({next_id++, ParticleKind::Discriminator,
                            {p.center, p.log_width, p.gain, p.offset}, time});
  return discriminators.back();
}

Particle& PopulationState::spawn_generator(const GeneratorParams& p) {
  generators.push_back(
      {next_id++, ParticleKind::Generator, {p.mean, p.log_sigma}, time});
  return generators.back();
}

void PopulationState::validate() const {
  require(std::isfinite(time), "population time must be finite");
  std::vector<std::int64_t> ids;
  ids.reserve(discriminators.size() + generators.size());
  auto check_particle = [&](const Particle& p) {
    require(p.position.size() == static_cast<std::size_t>(kind_dimension(p.kind)),
            "particle position dimension does not match its kind");
    require(all_finite(p.position), "particle positions must be finite");
    require(p.id >= 0 && p.id < next_id, "particle id must be below next_id");
    ids.push_back(p.id);
  };
  for (const Particle& p : discriminators) check_particle(p);
  for (const Particle& p : generators) check_particle(p);
  std::sort(ids.begin(), ids.end());
  require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(),
          "particle ids must be unique");
}

void RateParams::validate() const {
  require(std::isfinite(generator_death_rate) && generator_death_rate >= 0.0,
          "generator_death_rate must be finite and nonnegative");
  require(std::isfinite(disc_replication_scale) && disc_replication_scale >= 0.0,
          "disc_replication_scale must be finite and nonnegative");
  require(std::isfinite(disc_death_scale) && disc_death_scale >= 0.0,
          "disc_death_scale must be finite and nonnegative");
  require(std::isfinite(gen_replication_scale) && gen_replication_scale >= 0.0,
          "gen_replication_scale must be finite and nonnegative");
  require(population_cap >= 1, "population_cap must be at least 1");
}

PopulationFunctionals population_functionals(const PopulationState& state,
                                             std::span<const double> sample,
                                             const GanQuadrature& quad) {
  quad.validate();
  require_sample(sample);
  state.validate();

  std::vector<DiscriminatorParams> ds;
  ds.reserve(state.discriminators.size());
  for (const Particle& p : state.discriminators) ds.push_back(as_discriminator(p));
  std::vector<GeneratorParams> gs;
  gs.reserve(state.generators.size());
  for (const Particle& p : state.generators) gs.push_back(as_generator(p));

  PairTables t = pair_tables(ds, gs, sample, quad);
  return {std::move(t.disc_data), std::move(t.disc_pair), std::move(t.gen_pair)};
}

BranchingDiagnostics branching_step(PopulationState& state, std::span<const double> sample,
                                    const RateParams& rates, double temperature, double dt,
                                    RngStream& rng, const GanQuadrature& quad,
                                    const MobilityMask& mask) {
  rates.validate();
  quad.validate();
  require_sample(sample);
  require(std::isfinite(temperature) && temperature >= 0.0,
          "temperature must be finite and nonnegative");
  require(std::isfinite(dt) && dt > 0.0, "dt must be finite and positive");
  state.validate();

  const std::size_t nd = state.discriminators.size();
  const std::size_t ng = state.generators.size();

  std::vector<DiscriminatorParams> ds;
  ds.reserve(nd);
  for (const Particle& p : state.discriminators) ds.push_back(as_discriminator(p));
  std::vector<GeneratorParams> gs;
  gs.reserve(ng);
  for (const Particle& p : state.generators) gs.push_back(as_generator(p));

  // Drifts at the current positions: discriminators ascend data + pair terms,
  // generators descend their summed pair term.
  std::vector<std::array<double, kDiscriminatorDim>> disc_drift(nd);
  for (std::size_t a = 0; a < nd; ++a) {
    const GanGradient g = gan_data_term_gradient(ds[a], sample);
    disc_drift[a] = {g.disc_center, g.disc_log_width, g.disc_gain, g.disc_offset};
  }
  std::vector<std::array<double, kGeneratorDim>> gen_drift(ng, {0.0, 0.0});
  for (std::size_t a = 0; a < nd; ++a) {
    for (std::size_t b = 0; b < ng; ++b) {
      const GanGradient g = gan_generator_term_gradient(ds[a], gs[b], quad);
      disc_drift[a][0] += g.disc_center;
      disc_drift[a][1] += g.disc_log_width;
      disc_drift[a][2] += g.disc_gain;
      disc_drift[a][3] += g.disc_offset;
      gen_drift[b][0] += g.gen_mean;
      gen_drift[b][1] += g.gen_log_sigma;
    }
  }
  for (auto& d : gen_drift) {
    d[0] = -d[0];
    d[1] = -d[1];
  }
  for (const auto& d : disc_drift)
    if (!all_finite(d)) throw SimulationFault("non-finite drift; step rejected");
  for (const auto& d : gen_drift)
    if (!all_finite(d)) throw SimulationFault("non-finite drift; step rejected");

  // Moves into temporaries; on rejection below both state and rng roll back.
  const RngStream rng_backup = rng;
  const double noise_scale = temperature > 0.0 ? std::sqrt(2.0 * temperature * dt) : 0.0;
  std::vector<DiscriminatorParams> moved_d(nd);
  for (std::size_t a = 0; a < nd; ++a) {
    std::array<double, kDiscriminatorDim> pos = {ds[a].center, ds[a].log_width,
                                                 ds[a].gain, ds[a].offset};
    for (int i = 0; i < kDiscriminatorDim; ++i) {
      if (!mask.discriminator[i]) continue;
      const double noise = temperature > 0.0 ? noise_scale * rng.normal() : 0.0;
      pos[i] += dt * disc_drift[a][i] + noise;
    }
    moved_d[a] = {pos[0], pos[1], pos[2], pos[3]};
  }
  std::vector<GeneratorParams> moved_g(ng);
  for (std::size_t b = 0; b < ng; ++b) {
    std::array<double, kGeneratorDim> pos = {gs[b].mean, gs[b].log_sigma};
    for (int i = 0; i < kGeneratorDim; ++i) {
      if (!mask.generator[i]) continue;
      const double noise = temperature > 0.0 ? noise_scale * rng.normal() : 0.0;
      pos[i] += dt * gen_drift[b][i] + noise;
    }
    moved_g[b] = {pos[0], pos[1]};
  }

  // Event probabilities at the moved positions.
  const PairTables tables = pair_tables(moved_d, moved_g, sample, quad);
  std::vector<double> p_rep_d(nd), p_die_d(nd), p_rep_g(ng);
  for (std::size_t a = 0; a < nd; ++a) {
    p_rep_d[a] = rates.disc_replication_scale * std::exp(tables.disc_data[a]) * dt;
    p_die_d[a] = rates.disc_death_scale * -tables.disc_pair[a] * dt;
  }
  for (std::size_t b = 0; b < ng; ++b)
    p_rep_g[b] = rates.gen_replication_scale * -tables.gen_pair[b] * dt;
  const double p_die_g = rates.generator_death_rate * dt;

  double max_p = 0.0;
  bool admissible = true;
  auto admit = [&max_p, &admissible](double p) {
    if (p > max_p) max_p = p;
    if (!(p >= 0.0 && p < 1.0)) admissible = false;
  };
  for (std::size_t a = 0; a < nd; ++a) {
    admit(p_rep_d[a]);
    admit(p_die_d[a]);
  }
  for (std::size_t b = 0; b < ng; ++b) admit(p_rep_g[b]);
  if (ng > 0) admit(p_die_g);
  if (!admissible) {
    rng = rng_backup;
    throw ValidationError("event probability rate*dt reached 1; refine dt");
  }

  // Commit moves and advance the clock; events are stamped with the new time.
  for (std::size_t a = 0; a < nd; ++a) {
    state.discriminators[a].position = {moved_d[a].center, moved_d[a].log_width,
                                        moved_d[a].gain, moved_d[a].offset};
  }
  for (std::size_t b = 0; b < ng; ++b)
    state.generators[b].position = {moved_g[b].mean, moved_g[b].log_sigma};
  const double new_time = state.time + dt;
  state.time = new_time;

  BranchingDiagnostics diag;
  diag.max_event_probability = max_p;
  std::int64_t census = static_cast<std::int64_t>(nd + ng);
  std::vector<Particle> disc_children, gen_children;
  std::vector<char> dead_d(nd, 0), dead_g(ng, 0);

  auto try_replicate = [&](const Particle& parent, std::vector<Particle>& children) {
    if (census < rates.population_cap) {
      Particle child = parent;
      child.id = state.next_id++;
      child.birth_time = new_time;
      state.events.push_back({new_time, PopulationEventType::Replicate, parent.kind,
                              parent.id, child.id});
      children.push_back(std::move(child));
      ++census;
      ++diag.replications;
    } else {
      state.events.push_back({new_time, PopulationEventType::ReplicationRefused,
                              parent.kind, parent.id, -1});
      ++diag.refused_replications;
    }
  };
  auto mark_death = [&](const Particle& p, std::vector<char>& dead, std::size_t i) {
    dead[i] = 1;
    state.events.push_back({new_time, PopulationEventType::Die, p.kind, p.id, -1});
    ++diag.deaths;
  };

  for (std::size_t a = 0; a < nd; ++a) {
    if (p_rep_d[a] > 0.0 && rng.uniform() < p_rep_d[a])
      try_replicate(state.discriminators[a], disc_children);
    if (p_die_d[a] > 0.0 && rng.uniform() < p_die_d[a])
      mark_death(state.discriminators[a], dead_d, a);
  }
  for (std::size_t b = 0; b < ng; ++b) {
    if (p_rep_g[b] > 0.0 && rng.uniform() < p_rep_g[b])
      try_replicate(state.generators[b], gen_children);
    if (p_die_g > 0.0 && rng.uniform() < p_die_g)
      mark_death(state.generators[b], dead_g, b);
  }

  compact(state.discriminators, dead_d);
  for (Particle& c : disc_children) state.discriminators.push_back(std::move(c));
  compact(state.generators, dead_g);
  for (Particle& c : gen_children) state.generators.push_back(std::move(c));
  return diag;
}

PeakCensus discriminator_census(const PopulationState& state, double first_center,
                                double second_center) {
  PeakCensus out;
  for (const Particle& p : state.discriminators) {
    const double m = as_discriminator(p).center;
    if (std::abs(m - first_center) <= std::abs(m - second_center))
      ++out.near_first;
    else
      ++out.near_second;
  }
  return out;
}

void SuppressionConfig::validate() const {
  rates.validate();
  quadrature.validate();
  require(std::isfinite(peak_separation) && peak_separation > 0.0,
          "peak_separation must be finite and positive");
  require(std::isfinite(narrow_spread) && narrow_spread > 0.0 &&
              std::isfinite(wide_spread) && wide_spread > 0.0,
          "cluster spreads must be finite and positive");
  require(narrow_points >= 1 && wide_points >= 1,
          "each cluster needs at least one point");
  const double shape[4] = {disc_log_width, disc_gain, disc_offset, gen_log_sigma};
  require(all_finite(shape), "frozen shape parameters must be finite");
  require(initial_discs_per_peak >= 1, "need at least one discriminator per peak");
  require(initial_generators >= 1, "need at least one generator");
  require(std::isfinite(temperature) && temperature >= 0.0,
          "temperature must be finite and nonnegative");
  require(std::isfinite(dt) && dt > 0.0, "dt must be finite and positive");
  require(steps >= 1, "steps must be at least 1");
  require(measure_fraction > 0.0 && measure_fraction <= 1.0,
          "measure_fraction must lie in (0, 1]");
  require(runs >= 2, "need at least two runs for the paired comparison");
}

std::vector<double> suppression_sample(const SuppressionConfig& cfg, RngStream& rng) {
  const double m_narrow = -0.5 * cfg.peak_separation;
  const double m_wide = 0.5 * cfg.peak_separation;
  std::vector<double> sample;
  sample.reserve(static_cast<std::size_t>(cfg.narrow_points + cfg.wide_points));
  for (int i = 0; i < cfg.narrow_points; ++i)
    sample.push_back(m_narrow + cfg.narrow_spread * rng.normal());
  for (int i = 0; i < cfg.wide_points; ++i)
    sample.push_back(m_wide + cfg.wide_spread * rng.normal());
  return sample;
}

PopulationState suppression_initial_state(const SuppressionConfig& cfg,
                                          bool with_generators) {
  const double m_narrow = -0.5 * cfg.peak_separation;
  const double m_wide = 0.5 * cfg.peak_separation;
  PopulationState st;
  for (int i = 0; i < cfg.initial_discs_per_peak; ++i) {
    st.spawn_discriminator(
        {m_narrow, cfg.disc_log_width, cfg.disc_gain, cfg.disc_offset});
    st.spawn_discriminator(
        {m_wide, cfg.disc_log_width, cfg.disc_gain, cfg.disc_offset});
  }
  if (with_generators) {
    for (int i = 0; i < cfg.initial_generators; ++i)
      st.spawn_generator({i % 2 == 0 ? m_narrow : m_wide, cfg.gen_log_sigma});
  }
  return st;
}

MobilityMask suppression_mobility() {
  return {{true, false, false, false}, {true, false}};
}

SuppressionSummary narrow_peak_suppression_experiment(const SuppressionConfig& cfg,
                                                      std::uint64_t seed) {
  cfg.validate();
  const double m_narrow = -0.5 * cfg.peak_separation;
  const double m_wide = 0.5 * cfg.peak_separation;
  const int window = std::max(1, static_cast<int>(std::lround(
                                     cfg.measure_fraction * cfg.steps)));
  const int window_start = cfg.steps - window;
  const MobilityMask mask = suppression_mobility();

  auto run_arm = [&](std::span<const double> sample, bool with_generators,
                     std::uint64_t stream) -> std::optional<double> {
    PopulationState st = suppression_initial_state(cfg, with_generators);
    RngStream rng(seed, stream);
    long long near_narrow = 0, near_wide = 0;
    for (int k = 0; k < cfg.steps; ++k) {
      branching_step(st, sample, cfg.rates, cfg.temperature, cfg.dt, rng,
                     cfg.quadrature, mask);
      if (st.discriminators.empty()) return std::nullopt;
      if (k >= window_start) {
        const PeakCensus census = discriminator_census(st, m_narrow, m_wide);
        near_narrow += census.near_first;
        near_wide += census.near_second;
      }
    }
    return static_cast<double>(near_narrow) /
           static_cast<double>(near_narrow + near_wide);
  };

  SuppressionSummary out;
  out.runs_requested = cfg.runs;
  std::vector<double> baseline, predated, diffs;
  for (int r = 0; r < cfg.runs; ++r) {
    RngStream sample_rng(seed, 3 * static_cast<std::uint64_t>(r));
    const std::vector<double> sample = suppression_sample(cfg, sample_rng);

    const auto base = run_arm(sample, false, 3 * static_cast<std::uint64_t>(r) + 1);
    const auto pred = run_arm(sample, true, 3 * static_cast<std::uint64_t>(r) + 2);
    if (!base || !pred) {
      ++out.excluded_runs;
      continue;
    }
    baseline.push_back(*base);
    predated.push_back(*pred);
    diffs.push_back(*pred - *base);
  }

  out.runs_used = static_cast<int>(diffs.size());
  if (out.runs_used >= 2) {
    out.baseline_narrow_fraction = mean(baseline);
    out.baseline_standard_error = standard_error(baseline);
    out.predated_narrow_fraction = mean(predated);
    out.predated_standard_error = standard_error(predated);
    out.mean_difference = mean(diffs);
    out.paired_t = t_statistic(diffs);
    out.suppressed_at_95 = out.paired_t < -1.66;
  }
  return out;
}

}  // namespace flatsim
