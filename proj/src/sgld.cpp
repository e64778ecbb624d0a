#include "flatsim/sgld.hpp"

#include <cmath>

#include "flatsim/common.hpp"

namespace flatsim {

void SgldConfig::validate(const Landscape& land) const {
  require(std::isfinite(learning_rate) && learning_rate > 0.0,
          "SgldConfig: learning_rate must be positive");
  require(std::isfinite(temperature) && temperature >= 0.0,
          "SgldConfig: temperature must be >= 0");
  require(max_iterations >= 1, "SgldConfig: max_iterations must be >= 1");
  require(capture_patience >= 1, "SgldConfig: capture_patience must be >= 1");
  require(record_stride >= 0, "SgldConfig: record_stride must be >= 0");
  require(static_cast<int>(x0.size()) == land.dimension(),
          "SgldConfig: x0 dimension does not match the landscape");
  require(all_finite(x0), "SgldConfig: x0 must be finite");
}

SgldRunResult sgld_run(const Landscape& land, const SgldConfig& config, RngStream& rng) {
  config.validate(land);
  SgldRunResult result;
  std::vector<double> x = config.x0;
  std::vector<double> g(x.size());
  std::optional<std::size_t> streak_well;
  long streak = 0;
  if (config.record_stride > 0) result.trajectory.push_back(x);

  for (long k = 0; k < config.max_iterations; ++k) {
    land.gradient(x, g);
    // Noise variance decays as T (1+k)^{-1/2}; k counts from zero.
    const double sd =
        std::sqrt(config.temperature) * std::pow(1.0 + static_cast<double>(k), -0.25);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += config.learning_rate * g[i];
      if (sd > 0.0) x[i] += sd * rng.normal();
    }
    result.iterations = k + 1;
    if (!all_finite(x)) {
      result.diverged = true;
      break;
    }
    if (config.record_stride > 0 && (k + 1) % config.record_stride == 0)
      result.trajectory.push_back(x);

    const auto member = land.membership(x);
    if (member.has_value() && member == streak_well) {
      ++streak;
    } else {
      streak_well = member;
      streak = member.has_value() ? 1 : 0;
    }
    if (streak >= config.capture_patience) {
      result.captured_well = streak_well;
      result.capture_iteration = result.iterations;
      break;
    }
  }
  result.final_x = std::move(x);
  return result;
}

std::vector<FractionPoint> wide_well_fraction(const Landscape& land, const SgldConfig& base,
                                              const std::vector<double>& temperatures,
                                              long runs_per_temperature, std::uint64_t seed) {
  require(!temperatures.empty(), "wide_well_fraction: temperatures must be nonempty");
  require(runs_per_temperature >= 1, "wide_well_fraction: runs_per_temperature must be >= 1");
  const std::size_t wide = land.widest_well();
  std::vector<FractionPoint> out;
  out.reserve(temperatures.size());
  for (std::size_t t = 0; t < temperatures.size(); ++t) {
    SgldConfig config = base;
    config.temperature = temperatures[t];
    config.record_stride = 0;
    FractionPoint point;
    point.temperature = temperatures[t];
    point.total_runs = runs_per_temperature;
    for (long r = 0; r < runs_per_temperature; ++r) {
      RngStream rng(seed, static_cast<std::uint64_t>(t) * runs_per_temperature +
                              static_cast<std::uint64_t>(r));
      const auto run = sgld_run(land, config, rng);
      if (!run.captured_well.has_value()) continue;
      ++point.captured_any;
      if (*run.captured_well == wide) ++point.captured_wide;
    }
    if (point.captured_any > 0) {
      point.defined = true;
      point.fraction =
          static_cast<double>(point.captured_wide) / static_cast<double>(point.captured_any);
    }
    out.push_back(point);
  }
  return out;
}

std::vector<CaptureCurve> capture_fraction_vs_iteration(const Landscape& land,
                                                        const SgldConfig& base,
                                                        const std::vector<double>& noise_scales,
                                                        long runs, std::uint64_t seed) {
  require(!noise_scales.empty(), "capture_fraction_vs_iteration: noise_scales must be nonempty");
  require(runs >= 1, "capture_fraction_vs_iteration: runs must be >= 1");
  std::vector<CaptureCurve> out;
  out.reserve(noise_scales.size());
  for (std::size_t s = 0; s < noise_scales.size(); ++s) {
    SgldConfig config = base;
    config.temperature = noise_scales[s];
    config.record_stride = 0;
    std::vector<long> captures_at(static_cast<std::size_t>(config.max_iterations) + 1, 0);
    for (long r = 0; r < runs; ++r) {
      RngStream rng(seed,
                    static_cast<std::uint64_t>(s) * runs + static_cast<std::uint64_t>(r));
      const auto run = sgld_run(land, config, rng);
      if (run.capture_iteration.has_value()) ++captures_at[*run.capture_iteration];
    }
    CaptureCurve curve;
    curve.noise_scale = noise_scales[s];
    curve.fraction.resize(captures_at.size());
    long cumulative = 0;
    for (std::size_t k = 0; k < captures_at.size(); ++k) {
      cumulative += captures_at[k];
      curve.fraction[k] = static_cast<double>(cumulative) / static_cast<double>(runs);
    }
    out.push_back(std::move(curve));
  }
  return out;
}

}  // namespace flatsim
