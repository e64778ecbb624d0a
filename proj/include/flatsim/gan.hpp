#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "flatsim/rng.hpp"

namespace flatsim {

/// Logistic-of-Gaussian discriminator: D(z) = sigmoid(gain * exp(-(z-center)^2 /
/// (2 s^2)) + offset) with s = exp(log_width), so D stays strictly inside (0,1)
/// and both log D and log(1-D) are finite for every finite parameter vector.
struct DiscriminatorParams {
  double center = 0.0;
  double log_width = 0.0;
  double gain = 1.0;
  double offset = 0.0;
};

/// Gaussian generator density N(mean, exp(2 log_sigma)).
struct GeneratorParams {
  double mean = 0.0;
  double log_sigma = 0.0;
};

double discriminator_logit(const DiscriminatorParams& d, double z);

/// Probability in (0,1); clamped away from exact 0/1 at machine precision.
double discriminator_value(const DiscriminatorParams& d, double z);

double generator_density(const GeneratorParams& g, double z);

/// Gauss-Legendre rule over generator mean +- half_width standard deviations.
/// half_width >= 4.9 keeps the tail mass outside the window below 1e-6.
struct GanQuadrature {
  int nodes = 64;
  double half_width = 8.0;
  void validate() const;
};

struct GanValue {
  double data_term = 0.0;       // (1/L) sum log D(z_l)
  double generator_term = 0.0;  // E_gen[log(1 - D)]
  double total = 0.0;
};

/// (1/L) sum_l log D(z_l): the discriminator's mean log-likelihood on the
/// sample. Always <= 0 because D < 1.
double gan_data_term(const DiscriminatorParams& d, std::span<const double> sample);

/// E_gen[log(1 - D)] by Gauss-Legendre on the standardized grid. Always < 0.
double gan_generator_term(const DiscriminatorParams& d, const GeneratorParams& g,
                          const GanQuadrature& quad = {});

GanValue gan_value(const DiscriminatorParams& d, const GeneratorParams& g,
                   std::span<const double> sample, const GanQuadrature& quad = {});

struct GanGradient {
  double disc_center = 0.0;
  double disc_log_width = 0.0;
  double disc_gain = 0.0;
  double disc_offset = 0.0;
  double gen_mean = 0.0;
  double gen_log_sigma = 0.0;
};

/// Gradient of the data term alone; generator components are zero.
GanGradient gan_data_term_gradient(const DiscriminatorParams& d,
                                   std::span<const double> sample);

/// Gradient of the generator term alone, in all six coordinates.
GanGradient gan_generator_term_gradient(const DiscriminatorParams& d,
                                        const GeneratorParams& g,
                                        const GanQuadrature& quad = {});

GanGradient gan_gradient(const DiscriminatorParams& d, const GeneratorParams& g,
                         std::span<const double> sample, const GanQuadrature& quad = {});

/// One coupled step: the discriminator ascends the value, the generator descends,
/// both share the noise scale sqrt(2 * temperature * dt). Draw order is fixed:
/// four discriminator normals (center, log_width, gain, offset), then two
/// generator normals (mean, log_sigma); temperature 0 draws nothing. A non-finite
/// gradient raises SimulationFault and leaves both parameter sets untouched.
void gan_sgld_step(DiscriminatorParams& d, GeneratorParams& g,
                   std::span<const double> sample, double temperature, double dt,
                   RngStream& rng, const GanQuadrature& quad = {});

using Density1D = std::function<double(double)>;

/// KL(p || q) = int p log(p/q) by Gauss-Legendre over [lo, hi]. Nodes where p
/// vanishes are skipped; q <= 0 under positive p mass beyond 1e-9 is rejected
/// with the violating mass in the message.
double kl_divergence(const Density1D& p, const Density1D& q, double lo, double hi,
                     int nodes = 256);

/// Gaussian KL by the same quadrature over mean_p +- 8 sigma_p.
double kl_divergence(double mean_p, double sigma_p, double mean_q, double sigma_q);

struct BilinearPoint {
  double time = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Noiseless minimax toy V = omega * x * y: explicit Euler for dx/dt = omega*y,
/// dy/dt = -omega*x. Rotates instead of converging; the radius grows by exactly
/// sqrt(1 + (omega*dt)^2) per step.
std::vector<BilinearPoint> bilinear_example_run(double omega, double x0, double y0,
                                                double dt, std::int64_t steps);

}  // namespace flatsim
