#include "flatsim/pursuit.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "flatsim/common.hpp"
#include "flatsim/landscape.hpp"
#include "flatsim/rng.hpp"
#include "flatsim/vecmath.hpp"

using namespace flatsim;

namespace {

// Narrow shallow well at the origin, wide deep well in the third quadrant.
Landscape chase_landscape() {
  return Landscape({{{0.0, 0.0}, 0.5, 0.25}, {{-7.0, -7.0}, 2.0, 8.0}});
}
constexpr int kNarrow = 0;
constexpr int kWide = 1;

PursuitConfig chase_config() {
  PursuitConfig cfg;
  cfg.prey_start = {0.5, 0.0};
  cfg.predator_start = {0.0, 2.0};
  return cfg;
}

InteractionParams ghost_params() {  // no interaction, no pursuit
  InteractionParams p;
  p.push_strength = 0.0;
  p.yukawa_strength = 0.0;
  p.pursuit_speed = 0.0;
  return p;
}

double cycle_pull(double depth, double width, double r) {
  return depth * r / (width * width) * std::exp(-0.5 * r * r / (width * width));
}

}  // namespace

TEST_CASE("interaction magnitude matches direct evaluation of both terms") {
  const InteractionParams p;
  // Sigmoid shoulder sits at exactly half strength at the rolloff distance.
  CHECK(interaction_magnitude(1.0, p) ==
        doctest::Approx(0.15 + 10.0 * std::exp(-10.0)).epsilon(1e-12));
  // Short range: full shoulder plus the dominant core.
  CHECK(interaction_magnitude(0.1, p) ==
        doctest::Approx(0.3 + 100.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(interaction_magnitude(0.1, p) == doctest::Approx(37.0879).epsilon(1e-4));
  // Long range: both terms decay toward zero.
  CHECK(interaction_magnitude(8.0, p) < 1e-8);
}

TEST_CASE("interaction magnitude decreases strictly in the separation") {
  const InteractionParams p;
  double prev = interaction_magnitude(0.01, p);
  for (int i = 1; i <= 500; ++i) {
    const double d = 0.01 + 4.99 * i / 500.0;
    const double cur = interaction_magnitude(d, p);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("pursuit force has the exact speed and aims at the prey") {
  const std::vector<double> delta{3.0, 4.0};
  const std::vector<double> f = pursuit_force(delta, 1.0);
  CHECK(f[0] == 0.6);
  CHECK(f[1] == 0.8);

  RngStream rng(17);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> dir{rng.normal(), rng.normal()};
    if (l2_norm(dir) < 1e-3) continue;
    const std::vector<double> force = pursuit_force(dir, 0.15);
    CHECK(l2_norm(force) == doctest::Approx(0.15).epsilon(1e-14));
    CHECK(dot(force, dir) > 0.0);  // toward the prey, never away
  }
}

TEST_CASE("coincident pair falls back to the first axis and raises the flag") {
  const std::vector<double> zero{0.0, 0.0};
  bool flagged = false;
  const std::vector<double> chase = pursuit_force(zero, 0.2, &flagged);
  CHECK(flagged);
  CHECK(chase[0] == 0.2);
  CHECK(chase[1] == 0.0);

  flagged = false;
  const InteractionParams p;
  const std::vector<double> push = interaction_force(zero, p, &flagged);
  CHECK(flagged);
  CHECK(push[1] == 0.0);
  CHECK(push[0] == doctest::Approx(interaction_magnitude(1e-9, p)).epsilon(1e-12));
}

TEST_CASE("interaction parameters validate the speed gap and reject negatives") {
  InteractionParams p;
  CHECK_NOTHROW(p.validate());
  p.pursuit_speed = 0.3;  // equal to the shoulder: prey could never hold a gap
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p.pursuit_speed = 0.0;  // a parked predator needs no gap
  CHECK_NOTHROW(p.validate());
  p.yukawa_decay = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK_NOTHROW(ghost_params().validate());
}

TEST_CASE("pursuit config validation catches dimension and step errors") {
  const Landscape land = chase_landscape();
  PursuitConfig cfg = chase_config();
  CHECK_NOTHROW(cfg.validate(land));
  cfg.prey_start = {0.0};
  CHECK_THROWS_AS(cfg.validate(land), ValidationError);
  cfg = chase_config();
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(land), ValidationError);
  cfg = chase_config();
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(land), ValidationError);
  cfg = chase_config();
  cfg.record_stride = 0;
  CHECK_THROWS_AS(cfg.validate(land), ValidationError);
}

TEST_CASE("ghost predator reduces the prey to plain gradient ascent") {
  const Landscape land = chase_landscape();
  PursuitConfig cfg = chase_config();
  cfg.interaction = ghost_params();
  cfg.steps = 7000;
  cfg.record_stride = 1;
  const PursuitTrajectory traj = pursuit_run(land, cfg);

  std::vector<double> x = cfg.prey_start;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    CHECK(traj.samples[k].prey[0] == x[0]);
    CHECK(traj.samples[k].prey[1] == x[1]);
    CHECK(traj.samples[k].predator[0] == 0.0);  // predator parked
    CHECK(traj.samples[k].predator[1] == 2.0);
    const std::vector<double> g = land.gradient(x);
    x[0] += cfg.dt * g[0];
    x[1] += cfg.dt * g[1];
  }
  // Ascent from inside the narrow basin converges onto that center.
  CHECK(l2_dist(traj.samples.back().prey, land.well(kNarrow).center) < 1e-3);
}

TEST_CASE("zero forces at a well center give a stationary trajectory") {
  const Landscape land({{{0.0, 0.0}, 0.5, 0.25}});  // lone well: center is exact
  PursuitConfig cfg;
  cfg.prey_start = {0.0, 0.0};
  cfg.predator_start = {5.0, 5.0};
  cfg.interaction = ghost_params();
  cfg.steps = 200;
  cfg.record_stride = 1;
  for (const auto& s : pursuit_run(land, cfg).samples) {
    CHECK(s.prey[0] == 0.0);
    CHECK(s.prey[1] == 0.0);
  }
}

TEST_CASE("chase run is pushed out of the narrow well and settles inside the wide one") {
  const Landscape land = chase_landscape();
  const PursuitTrajectory traj = pursuit_run(land, chase_config());
  CHECK_FALSE(traj.truncated);
  CHECK_FALSE(traj.step_limit_exceeded);
  CHECK_FALSE(traj.coincidence);

  const auto& wide = land.well(kWide);
  const auto& narrow = land.well(kNarrow);

  // Leaves the narrow vicinity for good.
  bool left_narrow = false;
  std::size_t first_wide = traj.samples.size();
  for (std::size_t s = 0; s < traj.samples.size(); ++s) {
    const double rn = l2_dist(traj.samples[s].prey, narrow.center);
    if (rn > 3.0 * narrow.width) left_narrow = true;
    if (first_wide == traj.samples.size() &&
        l2_dist(traj.samples[s].prey, wide.center) <= 2.0 * wide.width)
      first_wide = s;
  }
  CHECK(left_narrow);
  REQUIRE(first_wide < traj.samples.size());
  // Once inside two widths of the wide center it stays there to the end.
  for (std::size_t s = first_wide; s < traj.samples.size(); ++s)
    CHECK(l2_dist(traj.samples[s].prey, wide.center) <= 2.0 * wide.width);
}

TEST_CASE("chase run classifies as a pushout from the narrow into the wide well") {
  const Landscape land = chase_landscape();
  const PursuitTrajectory traj = pursuit_run(land, chase_config());
  const RegimeReport report = classify_regime(traj, land);
  CHECK(report.label == PursuitRegime::Pushout);
  CHECK(report.source_well == kNarrow);
  CHECK(report.terminal_well == kWide);
  CHECK(report.separation_p5 > 0.0);
  CHECK(report.separation_p95 >= report.separation_p5);
}

TEST_CASE("an oversized rolloff distance ejects the prey from both wells") {
  const Landscape land = chase_landscape();
  PursuitConfig cfg = chase_config();
  cfg.interaction.push_range = 20.0;
  cfg.steps = 400000;  // window must clear the wide well's flyby
  const RegimeReport report = classify_regime(pursuit_run(land, cfg), land);
  CHECK(report.label == PursuitRegime::Escape);
  CHECK(report.terminal_well == -1);
}

TEST_CASE("identical chase runs are bit-identical") {
  const Landscape land = chase_landscape();
  PursuitConfig cfg = chase_config();
  cfg.steps = 20000;
  const PursuitTrajectory a = pursuit_run(land, cfg);
  const PursuitTrajectory b = pursuit_run(land, cfg);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t s = 0; s < a.samples.size(); ++s) {
    CHECK(a.samples[s].prey[0] == b.samples[s].prey[0]);
    CHECK(a.samples[s].prey[1] == b.samples[s].prey[1]);
    CHECK(a.samples[s].predator[0] == b.samples[s].predator[0]);
    CHECK(a.samples[s].predator[1] == b.samples[s].predator[1]);
  }
}

TEST_CASE("settled no-predator run classifies as oscillation with the sign test waived") {
  const Landscape land = chase_landscape();
  PursuitConfig cfg;
  cfg.prey_start = {0.4, 0.1};
  cfg.predator_start = {30.0, 30.0};
  cfg.interaction = ghost_params();
  cfg.steps = 20000;
  const RegimeReport report = classify_regime(pursuit_run(land, cfg), land);
  CHECK(report.label == PursuitRegime::Oscillation);
  CHECK(report.terminal_well == kNarrow);
  CHECK(report.window_amplitude < 1e-6);
}

TEST_CASE("synthetic orbit classifies as oscillation through the sign-change test") {
  const Landscape land = chase_landscape();
  PursuitTrajectory traj;
  for (int k = 0; k < 200; ++k) {
    const double phase = 0.12 * k;
    const double radius = 2.0 + 0.5 * std::sin(0.7 * k);
    PursuitSample s;
    s.time = k;
    s.prey = {-7.0 + radius * std::cos(phase), -7.0 + radius * std::sin(phase)};
    s.predator = {-7.0, -7.0};
    s.separation = radius;
    s.objective = 0.0;
    traj.samples.push_back(s);
  }
  const RegimeReport report = classify_regime(traj, land);
  CHECK(report.label == PursuitRegime::Oscillation);
  CHECK(report.terminal_well == kWide);
  CHECK(report.window_amplitude > 1e-3);
  CHECK(report.window_sign_changes >= 2);
}

TEST_CASE("a window straddling the vicinity boundary is unsettled") {
  const Landscape land = chase_landscape();
  PursuitTrajectory traj;
  for (int k = 0; k < 100; ++k) {
    PursuitSample s;
    s.time = k;
    // Alternates between deep inside the wide vicinity and far outside it.
    s.prey = (k % 2 == 0) ? std::vector<double>{-7.0, -7.0}
                          : std::vector<double>{20.0, 20.0};
    s.predator = {0.0, 0.0};
    s.separation = 1.0;
    traj.samples.push_back(s);
  }
  CHECK(classify_regime(traj, land).label == PursuitRegime::Unsettled);
}

TEST_CASE("classification refuses a window below ten samples") {
  const Landscape land = chase_landscape();
  PursuitConfig cfg = chase_config();
  cfg.steps = 100;
  cfg.record_stride = 10;
  const PursuitTrajectory traj = pursuit_run(land, cfg);
  CHECK_THROWS_AS(classify_regime(traj, land), ValidationError);
}

TEST_CASE("non-finite forces truncate the run with the flag set") {
  const Landscape land = chase_landscape();
  PursuitConfig cfg;
  cfg.prey_start = {0.5, 0.0};
  cfg.predator_start = {0.5, 0.0};  // coincident: force evaluated at the floor
  cfg.interaction = ghost_params();
  cfg.interaction.yukawa_strength = 1e308;  // floor evaluation overflows
  cfg.steps = 10;
  cfg.record_stride = 1;
  const PursuitTrajectory traj = pursuit_run(land, cfg);
  CHECK(traj.truncated);
  CHECK(traj.coincidence);
  CHECK(traj.samples.size() < 12);
}

TEST_CASE("oversized prey steps raise the step-limit diagnostic") {
  const Landscape land = chase_landscape();
  PursuitConfig cfg;
  cfg.prey_start = {0.51, 0.0};
  cfg.predator_start = {0.5, 0.0};  // separation 0.01: core pushes ~900 hard
  cfg.steps = 5;
  cfg.record_stride = 1;
  const PursuitTrajectory traj = pursuit_run(land, cfg);
  CHECK(traj.step_limit_exceeded);
  CHECK_FALSE(traj.truncated);
}

TEST_CASE("limit cycle on the wide well closes all three relations") {
  const InteractionParams p;
  const double angle = M_PI / 18.0;
  const LimitCycleSolution sol = limiting_oscillation(8.0, 2.0, p, angle);
  REQUIRE(sol.feasible);
  CHECK(std::abs(sol.residual[0]) < 1e-8);
  CHECK(std::abs(sol.residual[1]) < 1e-8);
  CHECK(std::abs(sol.residual[2]) < 1e-8);

  // Relations restated through the public evaluators.
  const double g = cycle_pull(8.0, 2.0, sol.prey_radius);
  const double v = interaction_magnitude(sol.separation, p);
  CHECK(std::abs(g - v) < 1e-8);
  const double ry2 = sol.prey_radius * sol.prey_radius +
                     sol.separation * sol.separation -
                     2.0 * sol.prey_radius * sol.separation * std::cos(angle);
  CHECK(sol.predator_radius * sol.predator_radius == doctest::Approx(ry2).epsilon(1e-8));
  const double prey_speed =
      std::sqrt(g * g + v * v - 2.0 * g * v * std::cos(angle));
  CHECK(sol.prey_radius / sol.predator_radius ==
        doctest::Approx(prey_speed / p.pursuit_speed).epsilon(1e-6));
  CHECK(sol.prey_radius > 0.0);
  CHECK(sol.separation > 0.0);
}

TEST_CASE("limit cycle feasibility is lost as the angle vanishes") {
  const InteractionParams p;
  CHECK_FALSE(limiting_oscillation(8.0, 2.0, p, 1e-3).feasible);
  CHECK_FALSE(limiting_oscillation(8.0, 2.0, p, 1e-4).feasible);
}

TEST_CASE("the critical angle sits strictly between zero and eighteenth-pi") {
  const InteractionParams p;
  double lo = 1e-3, hi = M_PI / 18.0;
  REQUIRE_FALSE(limiting_oscillation(8.0, 2.0, p, lo).feasible);
  REQUIRE(limiting_oscillation(8.0, 2.0, p, hi).feasible);
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    (limiting_oscillation(8.0, 2.0, p, mid).feasible ? hi : lo) = mid;
  }
  CHECK(lo > 1e-3);
  CHECK(hi < M_PI / 18.0);
  CHECK(hi - lo < 1e-6);
  MESSAGE("critical pursuit angle = " << 0.5 * (lo + hi));
}

TEST_CASE("limit cycle solver validates its inputs") {
  const InteractionParams p;
  CHECK_THROWS_AS(limiting_oscillation(0.0, 2.0, p, 0.1), ValidationError);
  CHECK_THROWS_AS(limiting_oscillation(8.0, 0.0, p, 0.1), ValidationError);
  CHECK_THROWS_AS(limiting_oscillation(8.0, 2.0, p, 0.0), ValidationError);
  CHECK_THROWS_AS(limiting_oscillation(8.0, 2.0, p, 1.6), ValidationError);
  CHECK_THROWS_AS(limiting_oscillation(8.0, 2.0, ghost_params(), 0.1),
                  ValidationError);
}
