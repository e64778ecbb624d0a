#include "flatsim/gan.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "flatsim/common.hpp"
#include "flatsim/quadrature.hpp"
#include "flatsim/rng.hpp"

using namespace flatsim;

namespace {

const std::vector<double> kSample{-1.3, -0.4, 0.2, 0.9, 1.7, 2.4};

DiscriminatorParams random_disc(RngStream& rng) {
  return {4.0 * rng.uniform() - 2.0, 1.5 * rng.uniform() - 1.0,
          6.0 * rng.uniform() - 3.0, 4.0 * rng.uniform() - 2.0};
}

GeneratorParams random_gen(RngStream& rng) {
  return {4.0 * rng.uniform() - 2.0, 1.2 * rng.uniform() - 0.6};
}

}  // namespace

TEST_CASE("discriminator stays strictly inside the unit interval") {
  RngStream rng(41);
  for (int i = 0; i < 200; ++i) {
    const DiscriminatorParams d = random_disc(rng);
    const double z = 8.0 * rng.uniform() - 4.0;
    const double dv = discriminator_value(d, z);
    CHECK(dv > 0.0);
    CHECK(dv < 1.0);
  }
  // Saturating logits clamp instead of reaching 0 or 1.
  CHECK(discriminator_value({0.0, 0.0, 0.0, 1000.0}, 0.0) < 1.0);
  CHECK(discriminator_value({0.0, 0.0, 0.0, -1000.0}, 0.0) > 0.0);
}

TEST_CASE("constant-half discriminator splits the value into two log-halves") {
  const DiscriminatorParams half{0.0, 0.0, 0.0, 0.0};  // logit identically zero
  const GeneratorParams gen{0.7, -0.2};
  const GanValue v = gan_value(half, gen, kSample);
  const double log2 = std::log(2.0);
  CHECK(v.data_term == doctest::Approx(-log2).epsilon(1e-14));
  CHECK(v.generator_term == doctest::Approx(-log2).epsilon(1e-12));
  CHECK(v.total == doctest::Approx(-2.0 * log2).epsilon(1e-12));
}

TEST_CASE("generator density is normalized and the quadrature captures its mass") {
  const GeneratorParams gen{-1.4, 0.35};
  const double sigma = std::exp(gen.log_sigma);

  const auto& rule = gauss_legendre(64);
  double mass = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double z = gen.mean + sigma * 8.0 * rule.nodes[i];
    mass += 8.0 * sigma * rule.weights[i] * generator_density(gen, z);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

  // half_width 4.9 is the documented floor for 1e-6 coverage.
  double short_mass = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double z = gen.mean + sigma * 4.9 * rule.nodes[i];
    short_mass += 4.9 * sigma * rule.weights[i] * generator_density(gen, z);
  }
  CHECK(short_mass >= 1.0 - 1e-6);
}

TEST_CASE("both value terms are nonpositive everywhere") {
  RngStream rng(42);
  for (int i = 0; i < 100; ++i) {
    const GanValue v = gan_value(random_disc(rng), random_gen(rng), kSample);
    CHECK(v.data_term <= 0.0);
    CHECK(v.generator_term <= 0.0);
    CHECK(v.total == v.data_term + v.generator_term);
  }
}

TEST_CASE("generator term falls as the generator moves onto the high-response region") {
  const DiscriminatorParams d{0.0, 0.0, 4.0, -1.0};
  double prev = 0.0;
  bool first = true;
  for (double mean : {6.0, 4.0, 2.5, 1.2, 0.0}) {
    const GanValue v = gan_value(d, {mean, 0.0}, kSample);
    if (!first) CHECK(v.generator_term < prev);
    prev = v.generator_term;
    first = false;
  }
}

TEST_CASE("doubling the quadrature barely moves the generator term") {
  const DiscriminatorParams d{0.4, 0.1, 2.0, -0.5};
  const GeneratorParams g{-0.3, 0.2};
  const GanValue coarse = gan_value(d, g, kSample, {64, 8.0});
  const GanValue fine = gan_value(d, g, kSample, {128, 8.0});
  CHECK(std::abs(fine.generator_term - coarse.generator_term) < 1e-8);
}

TEST_CASE("value and gradient reject bad quadratures and empty samples") {
  const DiscriminatorParams d;
  const GeneratorParams g;
  CHECK_THROWS_AS(gan_value(d, g, kSample, {0, 8.0}), ValidationError);
  CHECK_THROWS_AS(gan_value(d, g, kSample, {513, 8.0}), ValidationError);
  CHECK_THROWS_AS(gan_value(d, g, kSample, {64, 4.8}), ValidationError);
  CHECK_THROWS_AS(gan_value(d, g, {}), ValidationError);
  CHECK_THROWS_AS(gan_gradient(d, g, {}), ValidationError);
}

TEST_CASE("analytic gradients match central finite differences") {
  RngStream rng(43);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const DiscriminatorParams d = random_disc(rng);
    const GeneratorParams g = random_gen(rng);
    const GanGradient an = gan_gradient(d, g, kSample);
    const double analytic[6] = {an.disc_center, an.disc_log_width, an.disc_gain,
                                an.disc_offset, an.gen_mean,       an.gen_log_sigma};
    const double h = 1e-6;
    for (int c = 0; c < 6; ++c) {
      DiscriminatorParams dp = d, dm = d;
      GeneratorParams gp = g, gm = g;
      double* fields_p[6] = {&dp.center, &dp.log_width, &dp.gain,
                             &dp.offset, &gp.mean,      &gp.log_sigma};
      double* fields_m[6] = {&dm.center, &dm.log_width, &dm.gain,
                             &dm.offset, &gm.mean,      &gm.log_sigma};
      *fields_p[c] += h;
      *fields_m[c] -= h;
      const double fd =
          (gan_value(dp, gp, kSample).total - gan_value(dm, gm, kSample).total) /
          (2.0 * h);
      CHECK(std::abs(fd - analytic[c]) <= 1e-5 * std::max(1.0, std::abs(analytic[c])));
      ++checked;
    }
  }
  CHECK(checked == 600);
}

TEST_CASE("a noiseless step climbs the value for the discriminator and sinks it for the generator") {
  const DiscriminatorParams d0{0.3, 0.0, 1.5, -0.4};
  const GeneratorParams g0{1.8, 0.1};
  for (double dt : {1e-3, 1e-4}) {
    DiscriminatorParams d = d0;
    GeneratorParams g = g0;
    RngStream rng(7);
    const double before = gan_value(d0, g0, kSample).total;
    gan_sgld_step(d, g, kSample, 0.0, dt, rng);
    CHECK(gan_value(d, g0, kSample).total >= before);   // ascent in the disc slice
    CHECK(gan_value(d0, g, kSample).total <= before);   // descent in the gen slice
  }
}

TEST_CASE("temperature zero is pure gradient play and never touches the rng") {
  DiscriminatorParams d{0.2, -0.1, 1.0, 0.3};
  GeneratorParams g{-0.8, 0.25};
  const GanGradient grad = gan_gradient(d, g, kSample);
  const DiscriminatorParams d0 = d;
  const GeneratorParams g0 = g;
  const double dt = 2e-3;
  RngStream rng(11);
  gan_sgld_step(d, g, kSample, 0.0, dt, rng);
  CHECK(d.center == d0.center + dt * grad.disc_center);
  CHECK(d.log_width == d0.log_width + dt * grad.disc_log_width);
  CHECK(d.gain == d0.gain + dt * grad.disc_gain);
  CHECK(d.offset == d0.offset + dt * grad.disc_offset);
  CHECK(g.mean == g0.mean - dt * grad.gen_mean);
  CHECK(g.log_sigma == g0.log_sigma - dt * grad.gen_log_sigma);
  CHECK(rng.normal() == RngStream(11).normal());  // stream still at its start
}

TEST_CASE("noisy steps follow the documented draw order and scale") {
  DiscriminatorParams d{0.2, -0.1, 1.0, 0.3};
  GeneratorParams g{-0.8, 0.25};
  const DiscriminatorParams d0 = d;
  const GeneratorParams g0 = g;
  const GanGradient grad = gan_gradient(d, g, kSample);
  const double theta = 0.6, dt = 1e-3;
  RngStream rng(2026);
  gan_sgld_step(d, g, kSample, theta, dt, rng);

  RngStream twin(2026);
  const double scale = std::sqrt(2.0 * theta * dt);
  double n[6];
  for (double& x : n) x = scale * twin.normal();
  // Same association as the implementation: drift and noise are summed first.
  CHECK(d.center == d0.center + (dt * grad.disc_center + n[0]));
  CHECK(d.log_width == d0.log_width + (dt * grad.disc_log_width + n[1]));
  CHECK(d.gain == d0.gain + (dt * grad.disc_gain + n[2]));
  CHECK(d.offset == d0.offset + (dt * grad.disc_offset + n[3]));
  CHECK(g.mean == g0.mean + (-dt * grad.gen_mean + n[4]));
  CHECK(g.log_sigma == g0.log_sigma + (-dt * grad.gen_log_sigma + n[5]));
}

TEST_CASE("identically seeded noisy runs stay bit-identical") {
  DiscriminatorParams da{0.1, 0.0, 1.2, -0.2}, db = da;
  GeneratorParams ga{1.1, 0.0}, gb = ga;
  RngStream ra(99), rb(99);
  for (int k = 0; k < 50; ++k) {
    gan_sgld_step(da, ga, kSample, 0.7, 1e-3, ra);
    gan_sgld_step(db, gb, kSample, 0.7, 1e-3, rb);
  }
  CHECK(da.center == db.center);
  CHECK(da.log_width == db.log_width);
  CHECK(da.gain == db.gain);
  CHECK(da.offset == db.offset);
  CHECK(ga.mean == gb.mean);
  CHECK(ga.log_sigma == gb.log_sigma);
}

TEST_CASE("a non-finite gradient rejects the step and leaves parameters untouched") {
  DiscriminatorParams d{0.0, -800.0, 1.0, 0.0};  // width underflows to zero
  GeneratorParams g{0.0, 0.0};
  RngStream rng(5);
  CHECK_THROWS_AS(gan_sgld_step(d, g, kSample, 0.5, 1e-3, rng), SimulationFault);
  CHECK(d.center == 0.0);
  CHECK(d.log_width == -800.0);
  CHECK(d.gain == 1.0);
  CHECK(d.offset == 0.0);
  CHECK(g.mean == 0.0);
  CHECK(g.log_sigma == 0.0);
}

TEST_CASE("step validation rejects bad temperature and dt") {
  DiscriminatorParams d;
  GeneratorParams g;
  RngStream rng(1);
  CHECK_THROWS_AS(gan_sgld_step(d, g, kSample, -0.1, 1e-3, rng), ValidationError);
  CHECK_THROWS_AS(gan_sgld_step(d, g, kSample, 0.5, 0.0, rng), ValidationError);
}

TEST_CASE("kl of a density with itself vanishes") {
  const GeneratorParams p{0.4, -0.3};
  const Density1D dens = [&](double z) { return generator_density(p, z); };
  CHECK(kl_divergence(dens, dens, -6.0, 7.0) == 0.0);
}

TEST_CASE("equal-width gaussian kl matches the quadratic mean gap") {
  const double sigma = 0.8;
  const double kl = kl_divergence(0.3, sigma, -0.42, sigma);
  const double gap = 0.3 - (-0.42);
  CHECK(kl == doctest::Approx(gap * gap / (2.0 * sigma * sigma)).epsilon(1e-6));
}

TEST_CASE("kl agrees between the generic and gaussian entry points") {
  const GeneratorParams p{0.2, std::log(0.7)};
  const GeneratorParams q{-0.5, std::log(1.3)};
  const double generic = kl_divergence(
      [&](double z) { return generator_density(p, z); },
      [&](double z) { return generator_density(q, z); }, 0.2 - 8.0 * 0.7,
      0.2 + 8.0 * 0.7);
  CHECK(kl_divergence(0.2, 0.7, -0.5, 1.3) == doctest::Approx(generic).epsilon(1e-12));
}

TEST_CASE("kl is asymmetric on an asymmetric pair") {
  const double forward = kl_divergence(0.0, 0.5, 0.4, 1.5);
  const double backward = kl_divergence(0.4, 1.5, 0.0, 0.5);
  CHECK(forward > 0.0);
  CHECK(backward > 0.0);
  CHECK(std::abs(forward - backward) > 0.1 * std::max(forward, backward));
}

TEST_CASE("kl stays nonnegative across random gaussian pairs") {
  RngStream rng(44);
  for (int i = 0; i < 50; ++i) {
    const double kl = kl_divergence(2.0 * rng.uniform() - 1.0, 0.4 + rng.uniform(),
                                    2.0 * rng.uniform() - 1.0, 0.4 + rng.uniform());
    CHECK(kl >= -1e-12);
  }
}

TEST_CASE("kl rejects support violations and reports the stranded mass") {
  const GeneratorParams p{0.0, 0.0};
  const Density1D pd = [&](double z) { return generator_density(p, z); };
  const Density1D truncated = [&](double z) {
    return z > 0.5 ? 0.0 : generator_density(p, z);
  };
  bool reported = false;
  try {
    kl_divergence(pd, truncated, -8.0, 8.0);
  } catch (const ValidationError& err) {
    reported = std::string(err.what()).find("support violation") != std::string::npos;
  }
  CHECK(reported);
  CHECK_THROWS_AS(kl_divergence(pd, pd, 8.0, -8.0), ValidationError);
  CHECK_THROWS_AS(kl_divergence(pd, pd, -8.0, 8.0, 0), ValidationError);
  CHECK_THROWS_AS(kl_divergence(0.0, -1.0, 0.0, 1.0), ValidationError);
}

TEST_CASE("bilinear euler tracks the analytic rotation within a milli") {
  const auto traj = bilinear_example_run(1.0, 0.0, 1.0, 1e-4, 62832);
  double worst_x = 0.0, worst_y = 0.0;
  for (const auto& pt : traj) {
    worst_x = std::max(worst_x, std::abs(pt.x - std::sin(pt.time)));
    worst_y = std::max(worst_y, std::abs(pt.y - std::cos(pt.time)));
  }
  CHECK(worst_x < 1e-3);
  CHECK(worst_y < 1e-3);
}

TEST_CASE("bilinear origin is an exact fixed point") {
  for (const auto& pt : bilinear_example_run(2.5, 0.0, 0.0, 1e-3, 500)) {
    CHECK(pt.x == 0.0);
    CHECK(pt.y == 0.0);
  }
}

TEST_CASE("bilinear radius grows by exactly the euler factor and never shrinks") {
  const double omega = 1.3, dt = 2e-3;
  const auto traj = bilinear_example_run(omega, 0.6, -0.8, dt, 2000);
  const double factor = 1.0 + omega * omega * dt * dt;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double r2_prev = traj[k - 1].x * traj[k - 1].x + traj[k - 1].y * traj[k - 1].y;
    const double r2 = traj[k].x * traj[k].x + traj[k].y * traj[k].y;
    CHECK(r2 == doctest::Approx(factor * r2_prev).epsilon(1e-13));
    CHECK(r2 >= r2_prev);  // rotation, no convergence toward the minimax
  }
}

TEST_CASE("bilinear radius drift is first order in dt over one period") {
  auto drift = [](double dt) {
    const auto traj =
        bilinear_example_run(1.0, 0.0, 1.0, dt, static_cast<std::int64_t>(std::ceil(
                                                    2.0 * M_PI / dt)));
    double worst = 0.0;
    for (const auto& pt : traj)
      worst = std::max(worst, std::abs(pt.x * pt.x + pt.y * pt.y - 1.0));
    return worst;
  };
  const double coarse = drift(1e-4);
  const double fine = drift(5e-5);
  const double ratio = coarse / fine;
  CHECK(ratio > 1.8);
  CHECK(ratio < 2.2);
  MESSAGE("radius drift constant C = dev/dt = " << coarse / 1e-4);
}

TEST_CASE("bilinear run validates its inputs") {
  CHECK_THROWS_AS(bilinear_example_run(1.0, 0.0, 1.0, 0.0, 10), ValidationError);
  CHECK_THROWS_AS(bilinear_example_run(1.0, 0.0, 1.0, 1e-3, 0), ValidationError);
}
