#include "flatsim/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "flatsim/common.hpp"
#include "flatsim/stats.hpp"
#include "flatsim/vecmath.hpp"

namespace flatsim {

namespace {

constexpr double kSeparationFloor = 1e-9;

// Unit direction of delta, or the first coordinate axis when the separation
// collapses below the floor.
std::vector<double> safe_direction(std::span<const double> delta, double d,
                                   bool* coincident) {
  std::vector<double> dir(delta.size(), 0.0);
  if (d < kSeparationFloor) {
    if (coincident != nullptr) *coincident = true;
    dir[0] = 1.0;
    return dir;
  }
  for (std::size_t i = 0; i < delta.size(); ++i) dir[i] = delta[i] / d;
  return dir;
}

double window_normalized_distance(std::span<const double> x, const GaussianWell& w) {
  return l2_dist(x, w.center) / w.width;
}

}  // namespace

void InteractionParams::validate() const {
  const double fields[6] = {push_strength,   push_range,   push_sharpness,
                            yukawa_strength, yukawa_decay, pursuit_speed};
  for (double f : fields)
    require(std::isfinite(f) && f >= 0.0, "interaction parameters must be finite and nonnegative");
  if (pursuit_speed > 0.0)
    require(push_strength > pursuit_speed,
            "pursuit_speed must stay below push_strength so the prey can hold a gap");
}

double interaction_magnitude(double d, const InteractionParams& p) {
  require(std::isfinite(d) && d > 0.0, "separation must be positive");
  const double arg = p.push_sharpness * (d - p.push_range);
  double shoulder;
  if (arg > 0.0) {
    const double t = std::exp(-arg);
    shoulder = p.push_strength * t / (1.0 + t);
  } else {
    shoulder = p.push_strength / (1.0 + std::exp(arg));
  }
  return shoulder + p.yukawa_strength * std::exp(-p.yukawa_decay * d) / d;
}

std::vector<double> interaction_force(std::span<const double> delta,
                                      const InteractionParams& p, bool* coincident) {
  const double d = l2_norm(delta);
  std::vector<double> dir = safe_direction(delta, d, coincident);
  const double mag = interaction_magnitude(std::max(d, kSeparationFloor), p);
  for (double& c : dir) c *= mag;
  return dir;
}

std::vector<double> pursuit_force(std::span<const double> delta, double pursuit_speed,
                                  bool* coincident) {
  require(std::isfinite(pursuit_speed) && pursuit_speed >= 0.0,
          "pursuit_speed must be finite and nonnegative");
  std::vector<double> dir = safe_direction(delta, l2_norm(delta), coincident);
  for (double& c : dir) c *= pursuit_speed;
  return dir;
}

void PursuitConfig::validate(const Landscape& land) const {
  interaction.validate();
  require(prey_start.size() == static_cast<std::size_t>(land.dimension()),
          "prey_start dimension must match the landscape");
  require(predator_start.size() == static_cast<std::size_t>(land.dimension()),
          "predator_start dimension must match the landscape");
  require(all_finite(prey_start) && all_finite(predator_start),
          "start positions must be finite");
  require(std::isfinite(dt) && dt > 0.0, "dt must be finite and positive");
  require(steps >= 1, "steps must be at least 1");
  require(record_stride >= 1, "record_stride must be at least 1");
}

PursuitTrajectory pursuit_run(const Landscape& land, const PursuitConfig& cfg) {
  cfg.validate(land);

  double min_width = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < land.well_count(); ++i)
    min_width = std::min(min_width, land.well(i).width);
  const double step_limit = 0.5 * min_width;

  PursuitTrajectory traj;
  traj.samples.reserve(static_cast<std::size_t>(cfg.steps / cfg.record_stride) + 2);

  const std::size_t dim = cfg.prey_start.size();
  std::vector<double> prey = cfg.prey_start;
  std::vector<double> predator = cfg.predator_start;
  std::vector<double> delta(dim), prey_next(dim), predator_next(dim);

  for (std::int64_t k = 0; k <= cfg.steps; ++k) {
    for (std::size_t i = 0; i < dim; ++i) delta[i] = prey[i] - predator[i];
    if (k % cfg.record_stride == 0)
      traj.samples.push_back({static_cast<double>(k) * cfg.dt, prey, predator,
                              l2_norm(delta), land.value(prey)});
    if (k == cfg.steps) break;

    bool hit_floor = false;
    const std::vector<double> grad = land.gradient(prey);
    const std::vector<double> push = interaction_force(delta, cfg.interaction, &hit_floor);
    const std::vector<double> chase =
        pursuit_force(delta, cfg.interaction.pursuit_speed, &hit_floor);
    traj.coincidence = traj.coincidence || hit_floor;

    for (std::size_t i = 0; i < dim; ++i) {
      prey_next[i] = prey[i] + cfg.dt * (grad[i] + push[i]);
      predator_next[i] = predator[i] + cfg.dt * chase[i];
    }
    if (!all_finite(prey_next) || !all_finite(predator_next)) {
      traj.truncated = true;
      break;
    }
    if (l2_dist(prey_next, prey) > step_limit) traj.step_limit_exceeded = true;
    prey.swap(prey_next);
    predator.swap(predator_next);
  }
  return traj;
}

RegimeReport classify_regime(const PursuitTrajectory& traj, const Landscape& land) {
  const std::size_t n = traj.samples.size();
  const std::size_t window_len = std::max<std::size_t>(n / 5, 1);
  require(window_len >= 10,
          "trajectory too short to classify: the final-20% window needs >= 10 samples");
  const std::size_t window_begin = n - window_len;

  // A well hosts the window when every window sample sits within 3 widths.
  const std::size_t wells = land.well_count();
  std::vector<bool> hosts(wells, true);
  std::vector<double> mean_nd(wells, 0.0);
  bool any_sample_inside_any = false;
  for (std::size_t s = window_begin; s < n; ++s) {
    const auto& prey = traj.samples[s].prey;
    for (std::size_t k = 0; k < wells; ++k) {
      const double nd = window_normalized_distance(prey, land.well(k));
      if (nd > 3.0) hosts[k] = false;
      if (nd <= 3.0) any_sample_inside_any = true;
      mean_nd[k] += nd;
    }
  }

  RegimeReport report;
  std::vector<double> separations;
  separations.reserve(window_len);
  for (std::size_t s = window_begin; s < n; ++s)
    separations.push_back(traj.samples[s].separation);
  report.separation_p5 = percentile(separations, 0.05);
  report.separation_p95 = percentile(separations, 0.95);

  int host = -1;
  for (std::size_t k = 0; k < wells; ++k)
    if (hosts[k] && (host < 0 || mean_nd[k] < mean_nd[static_cast<std::size_t>(host)]))
      host = static_cast<int>(k);

  if (host < 0) {
    report.label = any_sample_inside_any ? PursuitRegime::Unsettled : PursuitRegime::Escape;
    return report;
  }

  // Detrended distance-to-center over the window decides oscillation.
  const auto& center_well = land.well(static_cast<std::size_t>(host));
  std::vector<double> radial(window_len);
  for (std::size_t s = 0; s < window_len; ++s)
    radial[s] = l2_dist(traj.samples[window_begin + s].prey, center_well.center);
  const LineFit fit = fit_line(radial);
  std::vector<double> detrended(window_len);
  for (std::size_t s = 0; s < window_len; ++s)
    detrended[s] = radial[s] - (fit.intercept + fit.slope * static_cast<double>(s));
  double amplitude = 0.0;
  for (double r : detrended) amplitude = std::max(amplitude, std::abs(r));

  report.terminal_well = host;
  report.window_amplitude = amplitude;
  report.window_sign_changes = sign_changes(detrended);
  if (amplitude >= 1e-6 && report.window_sign_changes < 2) {
    report.label = PursuitRegime::Unsettled;
    return report;
  }

  // An earlier capture by a different well upgrades the label to a pushout.
  int source = -1;
  for (std::size_t s = 0; s < window_begin && source < 0; ++s) {
    const auto& prey = traj.samples[s].prey;
    double best_nd = 3.0;
    for (std::size_t k = 0; k < wells; ++k) {
      const double nd = window_normalized_distance(prey, land.well(k));
      if (nd <= best_nd) {
        best_nd = nd;
        source = static_cast<int>(k);
      }
    }
  }
  if (source >= 0 && source != host) {
    report.label = PursuitRegime::Pushout;
    report.source_well = source;
  } else {
    report.label = PursuitRegime::Oscillation;
  }
  return report;
}

namespace {

struct CycleResidual {
  double speed_ratio = 0.0;    // prey/predator radius ratio vs speed ratio
  double force_balance = 0.0;  // well pull vs repulsion
};

struct CycleContext {
  double depth;
  double width;
  double cos_angle;
  const InteractionParams* params;
};

double well_pull(const CycleContext& ctx, double r) {
  const double w2 = ctx.width * ctx.width;
  return ctx.depth * r / w2 * std::exp(-0.5 * r * r / w2);
}

double predator_radius(const CycleContext& ctx, double rx, double d) {
  const double arg = rx * rx + d * d - 2.0 * rx * d * ctx.cos_angle;
  return std::sqrt(std::max(arg, 0.0));
}

CycleResidual cycle_residual(const CycleContext& ctx, double rx, double d) {
  const double g = well_pull(ctx, rx);
  const double v = interaction_magnitude(d, *ctx.params);
  const double ry = predator_radius(ctx, rx, d);
  if (ry <= 0.0) return {std::numeric_limits<double>::infinity(), g - v};
  const double prey_speed = std::sqrt(
      std::max(g * g + v * v - 2.0 * g * v * ctx.cos_angle, 0.0));
  return {rx / ry - prey_speed / ctx.params->pursuit_speed, g - v};
}

double residual_score(const CycleResidual& r) {
  return std::max(std::abs(r.speed_ratio), std::abs(r.force_balance));
}

}  // namespace

LimitCycleSolution limiting_oscillation(double depth, double width,
                                        const InteractionParams& p, double angle) {
  require(std::isfinite(depth) && depth > 0.0, "well depth must be positive");
  require(std::isfinite(width) && width > 0.0, "well width must be positive");
  p.validate();
  require(p.pursuit_speed > 0.0, "a steady cycle needs a moving predator");
  require(std::isfinite(angle) && angle > 0.0 && angle < 1.5707963267948966,
          "angle must lie strictly inside (0, pi/2)");

  CycleContext ctx{depth, width, std::cos(angle), &p};

  // Grid-scan seeds, then damped Newton with a numeric Jacobian.
  const double rx_lo = std::max(1e-3 * width, 1e-6);
  const double rx_hi = 6.0 * width;
  const double d_lo = 5e-3;
  const double d_hi = std::max(6.0 * width, 4.0 * p.push_range);
  constexpr int kScan = 160;
  constexpr int kSeeds = 8;

  struct Seed {
    double score, rx, d;
  };
  std::vector<Seed> seeds;
  for (int i = 0; i < kScan; ++i) {
    const double rx = rx_lo + (rx_hi - rx_lo) * (i + 0.5) / kScan;
    for (int j = 0; j < kScan; ++j) {
      const double d = d_lo + (d_hi - d_lo) * (j + 0.5) / kScan;
      seeds.push_back({residual_score(cycle_residual(ctx, rx, d)), rx, d});
    }
  }
  std::partial_sort(seeds.begin(), seeds.begin() + kSeeds, seeds.end(),
                    [](const Seed& a, const Seed& b) { return a.score < b.score; });
  seeds.resize(kSeeds);

  // The prey must sit on the slope at a meaningful force level; without this
  // floor the degenerate branch (prey parked at the summit, predator receding)
  // satisfies both residuals at underflow scale.
  const double pull_floor = 1e-3 * depth / width * std::exp(-0.5);

  LimitCycleSolution best;
  double best_score = std::numeric_limits<double>::infinity();
  for (const Seed& seed : seeds) {
    double rx = seed.rx, d = seed.d;
    CycleResidual res = cycle_residual(ctx, rx, d);
    for (int iter = 0; iter < 100; ++iter) {
      const double score = residual_score(res);
      if (score < 1e-12) break;
      const double hx = 1e-7 * std::max(std::abs(rx), 1.0);
      const double hd = 1e-7 * std::max(std::abs(d), 1.0);
      const CycleResidual fx = cycle_residual(ctx, rx + hx, d);
      const CycleResidual fd = cycle_residual(ctx, rx, d + hd);
      const double j11 = (fx.speed_ratio - res.speed_ratio) / hx;
      const double j12 = (fd.speed_ratio - res.speed_ratio) / hd;
      const double j21 = (fx.force_balance - res.force_balance) / hx;
      const double j22 = (fd.force_balance - res.force_balance) / hd;
      const double det = j11 * j22 - j12 * j21;
      if (!std::isfinite(det) || std::abs(det) < 1e-300) break;
      double step_rx = -(j22 * res.speed_ratio - j12 * res.force_balance) / det;
      double step_d = -(j11 * res.force_balance - j21 * res.speed_ratio) / det;
      bool advanced = false;
      for (int damp = 0; damp < 40; ++damp) {
        const double try_rx = rx + step_rx;
        const double try_d = d + step_d;
        if (try_rx > 0.0 && try_d > 0.0) {
          const CycleResidual try_res = cycle_residual(ctx, try_rx, try_d);
          if (residual_score(try_res) < score) {
            rx = try_rx;
            d = try_d;
            res = try_res;
            advanced = true;
            break;
          }
        }
        step_rx *= 0.5;
        step_d *= 0.5;
      }
      if (!advanced) break;
    }
    const double score = residual_score(res);
    if (score < best_score && well_pull(ctx, rx) >= pull_floor) {
      best_score = score;
      best.prey_radius = rx;
      best.separation = d;
      best.predator_radius = predator_radius(ctx, rx, d);
      best.residual[0] = res.speed_ratio;
      best.residual[1] = res.force_balance;
      const double ry = best.predator_radius;
      best.residual[2] =
          ry * ry - (rx * rx + d * d - 2.0 * rx * d * ctx.cos_angle);
    }
  }
  best.feasible = best_score < 1e-10;
  return best;
}

}  // namespace flatsim
