#include "flatsim/gan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "flatsim/common.hpp"
#include "flatsim/quadrature.hpp"

namespace flatsim {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double softplus(double x) {
  // log(1 + e^x) without overflow on either tail.
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double standard_normal_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

struct LogitParts {
  double bump;   // exp(-(z-center)^2 / (2 s^2))
  double value;  // gain * bump + offset
};

LogitParts logit_parts(const DiscriminatorParams& d, double z) {
  const double s = std::exp(d.log_width);
  const double t = (z - d.center) / s;
  const double bump = std::exp(-0.5 * t * t);
  return {bump, d.gain * bump + d.offset};
}

void require_sample(std::span<const double> sample) {
  require(!sample.empty(), "sample must contain at least one point");
  require(all_finite(sample), "sample points must be finite");
}

}  // namespace

void GanQuadrature::validate() const {
  require(nodes >= 1 && nodes <= 512, "quadrature nodes must lie in [1, 512]");
  require(half_width >= 4.9,
          "quadrature half_width below 4.9 sigma leaves more than 1e-6 generator mass "
          "outside the window");
}

double discriminator_logit(const DiscriminatorParams& d, double z) {
  return logit_parts(d, z).value;
}

double discriminator_value(const DiscriminatorParams& d, double z) {
  const double p = 1.0 / (1.0 + std::exp(-discriminator_logit(d, z)));
  const double lo = std::numeric_limits<double>::min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(p, lo, hi);
}

double generator_density(const GeneratorParams& g, double z) {
  const double sigma = std::exp(g.log_sigma);
  const double u = (z - g.mean) / sigma;
  return standard_normal_pdf(u) / sigma;
}

double gan_data_term(const DiscriminatorParams& d, std::span<const double> sample) {
  require_sample(sample);
  double total = 0.0;
  for (double z : sample) total += -softplus(-logit_parts(d, z).value);
  return total / static_cast<double>(sample.size());
}

double gan_generator_term(const DiscriminatorParams& d, const GeneratorParams& g,
                          const GanQuadrature& quad) {
  quad.validate();
  // E_gen[log(1-D)] on the standardized grid z = mean + sigma*u, u in
  // [-half_width, half_width]; the nodes and weights never depend on the
  // generator parameters, so gradients of the quadratured value are exact.
  const auto& rule = gauss_legendre(quad.nodes);
  const double sigma = std::exp(g.log_sigma);
  double total = 0.0;
  for (int i = 0; i < quad.nodes; ++i) {
    const double u = quad.half_width * rule.nodes[i];
    const double w = quad.half_width * rule.weights[i] * standard_normal_pdf(u);
    const double z = g.mean + sigma * u;
    total += w * -softplus(logit_parts(d, z).value);
  }
  return total;
}

GanValue gan_value(const DiscriminatorParams& d, const GeneratorParams& g,
                   std::span<const double> sample, const GanQuadrature& quad) {
  GanValue out;
  out.data_term = gan_data_term(d, sample);
  out.generator_term = gan_generator_term(d, g, quad);
  out.total = out.data_term + out.generator_term;
  return out;
}

GanGradient gan_data_term_gradient(const DiscriminatorParams& d,
                                   std::span<const double> sample) {
  require_sample(sample);
  const double s = std::exp(d.log_width);
  GanGradient grad;
  // d/dp of (1/L) sum log D(z_l): log D = -softplus(-eta), d/deta = 1 - D.
  for (double z : sample) {
    const auto parts = logit_parts(d, z);
    const double one_minus_dv = 1.0 / (1.0 + std::exp(parts.value));
    const double dz = z - d.center;
    grad.disc_center += one_minus_dv * d.gain * parts.bump * dz / (s * s);
    grad.disc_log_width += one_minus_dv * d.gain * parts.bump * dz * dz / (s * s);
    grad.disc_gain += one_minus_dv * parts.bump;
    grad.disc_offset += one_minus_dv;
  }
  const double inv_l = 1.0 / static_cast<double>(sample.size());
  grad.disc_center *= inv_l;
  grad.disc_log_width *= inv_l;
  grad.disc_gain *= inv_l;
  grad.disc_offset *= inv_l;
  return grad;
}

GanGradient gan_generator_term_gradient(const DiscriminatorParams& d,
                                        const GeneratorParams& g,
                                        const GanQuadrature& quad) {
  quad.validate();
  const double s = std::exp(d.log_width);
  GanGradient grad;
  // d/dp of E_gen[log(1-D)]: log(1-D) = -softplus(eta), d/deta = -D; the
  // generator parameters enter through z = mean + sigma*u only.
  const auto& rule = gauss_legendre(quad.nodes);
  const double sigma = std::exp(g.log_sigma);
  for (int i = 0; i < quad.nodes; ++i) {
    const double u = quad.half_width * rule.nodes[i];
    const double w = quad.half_width * rule.weights[i] * standard_normal_pdf(u);
    const double z = g.mean + sigma * u;
    const auto parts = logit_parts(d, z);
    const double dv = 1.0 / (1.0 + std::exp(-parts.value));
    const double dz = z - d.center;
    const double eta_center = d.gain * parts.bump * dz / (s * s);
    const double eta_z = -eta_center;  // d eta / d z
    grad.disc_center += w * -dv * eta_center;
    grad.disc_log_width += w * -dv * d.gain * parts.bump * dz * dz / (s * s);
    grad.disc_gain += w * -dv * parts.bump;
    grad.disc_offset += w * -dv;
    grad.gen_mean += w * -dv * eta_z;
    grad.gen_log_sigma += w * -dv * eta_z * sigma * u;
  }
  return grad;
}

GanGradient gan_gradient(const DiscriminatorParams& d, const GeneratorParams& g,
                         std::span<const double> sample, const GanQuadrature& quad) {
  const GanGradient data = gan_data_term_gradient(d, sample);
  const GanGradient pair = gan_generator_term_gradient(d, g, quad);
  GanGradient grad;
  grad.disc_center = data.disc_center + pair.disc_center;
  grad.disc_log_width = data.disc_log_width + pair.disc_log_width;
  grad.disc_gain = data.disc_gain + pair.disc_gain;
  grad.disc_offset = data.disc_offset + pair.disc_offset;
  grad.gen_mean = data.gen_mean + pair.gen_mean;
  grad.gen_log_sigma = data.gen_log_sigma + pair.gen_log_sigma;
  return grad;
}

void gan_sgld_step(DiscriminatorParams& d, GeneratorParams& g,
                   std::span<const double> sample, double temperature, double dt,
                   RngStream& rng, const GanQuadrature& quad) {
  require(std::isfinite(temperature) && temperature >= 0.0,
          "temperature must be finite and nonnegative");
  require(std::isfinite(dt) && dt > 0.0, "dt must be finite and positive");

  const GanGradient grad = gan_gradient(d, g, sample, quad);
  const double parts[6] = {grad.disc_center, grad.disc_log_width, grad.disc_gain,
                           grad.disc_offset, grad.gen_mean,       grad.gen_log_sigma};
  if (!all_finite(parts)) throw SimulationFault("non-finite value gradient; step rejected");

  double noise[6] = {0, 0, 0, 0, 0, 0};
  if (temperature > 0.0) {
    const double scale = std::sqrt(2.0 * temperature * dt);
    for (double& n : noise) n = scale * rng.normal();
  }
  d.center += dt * grad.disc_center + noise[0];
  d.log_width += dt * grad.disc_log_width + noise[1];
  d.gain += dt * grad.disc_gain + noise[2];
  d.offset += dt * grad.disc_offset + noise[3];
  g.mean += -dt * grad.gen_mean + noise[4];
  g.log_sigma += -dt * grad.gen_log_sigma + noise[5];
}

double kl_divergence(const Density1D& p, const Density1D& q, double lo, double hi,
                     int nodes) {
  require(nodes >= 1 && nodes <= 512, "quadrature nodes must lie in [1, 512]");
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
          "integration window must be finite with lo < hi");

  const auto& rule = gauss_legendre(nodes);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double kl = 0.0;
  double violating_mass = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double z = mid + half * rule.nodes[i];
    const double w = half * rule.weights[i];
    double pv = p(z);
    require(std::isfinite(pv) && pv > -1e-9, "density p must be nonnegative and finite");
    if (pv <= 0.0) continue;
    const double qv = q(z);
    require(std::isfinite(qv) && qv > -1e-9, "density q must be nonnegative and finite");
    if (qv <= 0.0) {
      violating_mass += w * pv;
      continue;
    }
    kl += w * pv * std::log(pv / qv);
  }
  if (violating_mass > 1e-9)
    throw ValidationError("support violation: q vanishes under p mass " +
                          std::to_string(violating_mass));
  return kl;
}

double kl_divergence(double mean_p, double sigma_p, double mean_q, double sigma_q) {
  require(sigma_p > 0.0 && sigma_q > 0.0, "standard deviations must be positive");
  const GeneratorParams p{mean_p, std::log(sigma_p)};
  const GeneratorParams q{mean_q, std::log(sigma_q)};
  return kl_divergence([&](double z) { return generator_density(p, z); },
                       [&](double z) { return generator_density(q, z); },
                       mean_p - 8.0 * sigma_p, mean_p + 8.0 * sigma_p);
}

std::vector<BilinearPoint> bilinear_example_run(double omega, double x0, double y0,
                                                double dt, std::int64_t steps) {
  require(std::isfinite(omega), "omega must be finite");
  require(std::isfinite(x0) && std::isfinite(y0), "start point must be finite");
  require(std::isfinite(dt) && dt > 0.0, "dt must be finite and positive");
  require(steps >= 1, "steps must be at least 1");

  std::vector<BilinearPoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  double x = x0, y = y0;
  for (std::int64_t k = 0; k <= steps; ++k) {
    out.push_back({static_cast<double>(k) * dt, x, y});
    const double nx = x + dt * omega * y;
    const double ny = y - dt * omega * x;
    x = nx;
    y = ny;
  }
  return out;
}

}  // namespace flatsim
