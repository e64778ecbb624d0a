#include "flatsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>

#include "flatsim/branching.hpp"
#include "flatsim/common.hpp"
#include "flatsim/eyring.hpp"
#include "flatsim/gan.hpp"
#include "flatsim/landscape.hpp"
#include "flatsim/pursuit.hpp"
#include "flatsim/regression.hpp"
#include "flatsim/rng.hpp"
#include "flatsim/sde.hpp"
#include "flatsim/sgld.hpp"
#include "flatsim/stats.hpp"

namespace flatsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "flatsim 1.0.0";
constexpr const char* kRef = "reference";
constexpr const char* kTool = "tool-default";
constexpr const char* kNa = "NA";

json well_json(std::vector<double> center, double width, double amplitude) {
  return json{{"center", std::move(center)}, {"width", width}, {"amplitude", amplitude}};
}

// Two-well plane of the hill-climbing experiments (variance parameters 3 and
// 1.5 stated as widths sqrt(3), sqrt(1.5); heights are the variances squared
// over themselves, i.e. 9 and 2.25).
json hill_wells() {
  return json::array({well_json({-5.5, -5.5}, std::sqrt(3.0), 9.0),
                      well_json({3.0, 3.0}, std::sqrt(1.5), 2.25)});
}

// Narrow origin well and wide distant well of the pursuit experiments.
json chase_wells() {
  return json::array(
      {well_json({0.0, 0.0}, 0.5, 0.25), well_json({-7.0, -7.0}, 2.0, 8.0)});
}

// Equal-height 1D pair with a 2:1 width ratio; index 0 is the wide well.
json escape_wells() {
  return json::array({well_json({-2.5}, 1.0, 1.0), well_json({2.5}, 0.5, 1.0)});
}

json uniform_temperatures() {
  json out = json::array();
  for (int k = 0; k < 15; ++k) out.push_back(k * 0.8 / 14.0);
  return out;
}

// The trajectory-space interaction quoted by the pursuit experiments.
std::vector<ParamSpec> interaction_specs(const InteractionParams& d,
                                         const char* provenance) {
  return {
      {"push_strength", "number", d.push_strength, provenance,
       "plateau of the repulsion shoulder", 0.0, false},
      {"push_range", "number", d.push_range, provenance,
       "separation where the shoulder rolls off", 0.0, true},
      {"push_sharpness", "number", d.push_sharpness, provenance,
       "steepness of the shoulder sigmoid", 0.0, false},
      {"yukawa_strength", "number", d.yukawa_strength, provenance,
       "short-range core strength", 0.0, false},
      {"yukawa_decay", "number", d.yukawa_decay, provenance,
       "inverse range of the core", 0.0, false},
      {"pursuit_speed", "number", d.pursuit_speed, provenance,
       "predator speed toward the prey", 0.0, false},
  };
}

std::vector<ParamSpec> sgld_common() {
  return {
      {"wells", "wells", hill_wells(), kRef, "objective landscape"},
      {"learning_rate", "number", 0.05, kTool, "ascent step size", 0.0, true},
      {"max_iterations", "integer", 2000, kTool, "iteration budget per run", 1, false},
      {"capture_patience", "integer", 50, kTool,
       "consecutive in-vicinity iterations that count as capture", 1, false},
      {"x0", "numbers", json::array({0.0, 0.0}), kRef, "start point"},
  };
}

const std::map<std::string, std::vector<ParamSpec>>& schema_map() {
  static const std::map<std::string, std::vector<ParamSpec>> m = [] {
    std::map<std::string, std::vector<ParamSpec>> s;

    s["sgld_fraction"] = sgld_common();
    s["sgld_fraction"].push_back({"temperatures", "numbers", uniform_temperatures(),
                                  kRef, "noise temperatures to sweep", 0.0, false});
    s["sgld_fraction"].push_back(
        {"runs", "integer", 200, kRef, "seeded runs per temperature", 1, false});

    s["sgld_capture_curve"] = sgld_common();
    s["sgld_capture_curve"].push_back({"noise_scales", "numbers",
                                       json::array({0.1, 0.3, 0.5}), kTool,
                                       "noise scales, one curve each", 0.0, false});
    s["sgld_capture_curve"].push_back(
        {"runs", "integer", 100, kTool, "seeded runs per noise scale", 1, false});

    s["fp_verify"] = {
        {"wells", "wells", escape_wells(), kRef, "1D landscape; potential is its negative"},
        {"theta", "number", 0.4, kTool, "diffusion temperature", 0.0, true},
        {"grid_lo", "number", -6.0, kTool, "left grid edge"},
        {"grid_hi", "number", 6.0, kTool, "right grid edge"},
        {"nodes", "integer", 301, kTool, "grid nodes", 3, false},
        {"dt", "number", 3e-4, kTool, "time step (must sit below the explicit limit)",
         0.0, true},
        {"steps", "integer", 10000, kRef, "evolution steps", 1, false},
        {"record_stride", "integer", 100, kTool, "steps between drift samples", 1, false},
    };

    s["eyring_mfpt"] = {
        {"wells", "wells", escape_wells(), kRef,
         "two 1D wells; index 0 wide, index 1 narrow"},
        {"theta", "number", 0.25, kRef, "temperature (barrier height is 1)", 0.0, true},
        {"runs", "integer", 150, kTool, "passage runs per well", 1, false},
        {"max_steps", "integer", 3000000, kTool, "step cap per run", 1, false},
        {"dt", "number", 2e-3, kTool, "diffusion step", 0.0, true},
    };

    s["gan_trajectory"] = {
        {"disc_center", "number", 0.0, kTool, "initial discriminator bump center"},
        {"disc_log_width", "number", 0.0, kTool, "initial log bump width"},
        {"disc_gain", "number", 1.0, kTool, "initial logit gain"},
        {"disc_offset", "number", 0.0, kTool, "initial logit offset"},
        {"gen_mean", "number", 2.0, kTool, "initial generator mean"},
        {"gen_log_sigma", "number", 0.0, kTool, "initial generator log sigma"},
        {"sample", "numbers", json::array({-0.5, 0.5}), kTool, "data sample points"},
        {"temperature", "number", 0.01, kTool, "shared noise temperature", 0.0, false},
        {"dt", "number", 1e-3, kTool, "step size", 0.0, true},
        {"steps", "integer", 20000, kTool, "coupled updates", 1, false},
        {"record_stride", "integer", 10, kTool, "steps between CSV rows", 1, false},
        {"quad_nodes", "integer", 64, kTool, "generator-expectation quadrature nodes",
         1, false},
        {"quad_half_width", "number", 8.0, kTool,
         "quadrature window in generator sigmas", 4.9, false},
    };

    s["bilinear_check"] = {
        {"omega", "number", 1.0, kRef, "bilinear coupling", 0.0, true},
        {"x0", "number", 1.0, kRef, "initial x"},
        {"y0", "number", 0.0, kRef, "initial y"},
        {"dt", "number", 1e-4, kRef, "Euler step", 0.0, true},
        {"steps", "integer", 62832, kTool, "steps (default covers one period)", 1,
         false},
        {"record_stride", "integer", 100, kTool, "steps between CSV rows", 1, false},
    };

    s["predator_prey"] = {
        {"wells", "wells", chase_wells(), kRef, "2D objective landscape"},
        {"prey_start", "numbers", json::array({0.5, 0.0}), kRef, "prey start"},
        {"predator_start", "numbers", json::array({0.0, 2.0}), kRef, "predator start"},
        {"dt", "number", 1e-3, kRef, "Euler step", 0.0, true},
        {"steps", "integer", 80000, kTool,
         "steps (long enough for the terminal window to settle)", 1, false},
        {"record_stride", "integer", 20, kTool, "steps between samples", 1, false},
    };
    for (ParamSpec& p : interaction_specs(InteractionParams{}, kRef))
      s["predator_prey"].push_back(p);

    s["oscillation_solve"] = {
        {"depth", "number", 8.0, kRef, "well peak height", 0.0, true},
        {"width", "number", 2.0, kRef, "well width", 0.0, true},
        {"angle", "number", std::numbers::pi / 18.0, kRef,
         "prey-side closing angle of the cycle", 0.0, true},
    };
    for (ParamSpec& p : interaction_specs(InteractionParams{}, kRef))
      s["oscillation_solve"].push_back(p);

    {
      const SuppressionConfig d;
      s["branching"] = {
          {"peak_separation", "number", d.peak_separation, kTool,
           "distance between the likelihood peaks", 0.0, true},
          {"narrow_spread", "number", d.narrow_spread, kTool,
           "narrow cluster standard deviation", 0.0, true},
          {"wide_spread", "number", d.wide_spread, kTool,
           "wide cluster standard deviation", 0.0, true},
          {"narrow_points", "integer", d.narrow_points, kTool,
           "sample points in the narrow cluster", 1, false},
          {"wide_points", "integer", d.wide_points, kTool,
           "sample points in the wide cluster", 1, false},
          {"disc_log_width", "number", d.disc_log_width, kTool,
           "frozen discriminator log width"},
          {"disc_gain", "number", d.disc_gain, kTool, "frozen discriminator gain"},
          {"disc_offset", "number", d.disc_offset, kTool, "frozen discriminator offset"},
          {"gen_log_sigma", "number", d.gen_log_sigma, kTool,
           "frozen generator log sigma"},
          {"initial_discs_per_peak", "integer", d.initial_discs_per_peak, kTool,
           "starting discriminators per peak", 1, false},
          {"initial_generators", "integer", d.initial_generators, kTool,
           "starting generators", 1, false},
          {"generator_death_rate", "number", d.rates.generator_death_rate, kTool,
           "flat generator death rate", 0.0, false},
          {"disc_replication_scale", "number", d.rates.disc_replication_scale, kTool,
           "discriminator replication rate scale", 0.0, false},
          {"disc_death_scale", "number", d.rates.disc_death_scale, kTool,
           "discriminator death rate scale", 0.0, false},
          {"gen_replication_scale", "number", d.rates.gen_replication_scale, kTool,
           "generator replication rate scale", 0.0, false},
          {"population_cap", "integer", d.rates.population_cap, kTool,
           "replication refusals start above this census", 1, false},
          {"temperature", "number", d.temperature, kTool, "move noise temperature",
           0.0, false},
          {"dt", "number", d.dt, kTool, "step size", 0.0, true},
          {"steps", "integer", d.steps, kTool, "steps to run", 1, false},
          {"measure_fraction", "number", d.measure_fraction, kTool,
           "trailing fraction of steps in the census window", 0.0, true},
          {"record_stride", "integer", 20, kTool, "steps between census rows", 1, false},
          {"generators_enabled", "boolean", true, kTool,
           "false runs the generator-free baseline"},
          {"quad_nodes", "integer", d.quadrature.nodes, kTool,
           "generator-expectation quadrature nodes", 1, false},
          {"quad_half_width", "number", d.quadrature.half_width, kTool,
           "quadrature window in generator sigmas", 4.9, false},
      };
    }

    s["regression"] = {
        {"csv", "string", "data/wine.csv", kTool, "feature/class CSV path"},
        {"train_fraction", "number", 0.8, kRef, "train share of the shuffle split",
         0.0, true},
        {"gd_learning_rate", "number", 0.02, kTool, "gradient-descent step", 0.0, true},
        {"gd_iterations", "integer", 30000, kTool, "gradient-descent budget", 0, false},
        {"pp_dt", "number", 0.02, kTool, "predator-prey step", 0.0, true},
        {"pp_iterations", "integer", 600, kTool, "predator-prey budget", 0, false},
    };
    for (ParamSpec& p : interaction_specs(regression_interaction(), kTool))
      s["regression"].push_back(p);

    return s;
  }();
  return m;
}

void check_value(const json& v, const ParamSpec& spec, const std::string& path) {
  auto bound_ok = [&](double x) {
    return spec.exclusive_min ? x > spec.min_value : x >= spec.min_value;
  };
  auto check_bound = [&](double x) {
    require(std::isfinite(x), path + ": value must be finite");
    require(bound_ok(x), path + ": value " + format_float(x) + " violates the lower bound " +
                             format_float(spec.min_value) +
                             (spec.exclusive_min ? " (exclusive)" : ""));
  };
  if (spec.type == "number") {
    require(v.is_number(), path + ": expected a number");
    check_bound(v.get<double>());
  } else if (spec.type == "integer") {
    require(v.is_number_integer(), path + ": expected an integer");
    check_bound(static_cast<double>(v.get<std::int64_t>()));
  } else if (spec.type == "boolean") {
    require(v.is_boolean(), path + ": expected a boolean");
  } else if (spec.type == "string") {
    require(v.is_string() && !v.get<std::string>().empty(),
            path + ": expected a non-empty string");
  } else if (spec.type == "numbers") {
    require(v.is_array() && !v.empty(), path + ": expected a non-empty number array");
    for (const json& e : v) {
      require(e.is_number(), path + ": expected only numbers");
      check_bound(e.get<double>());
    }
  } else if (spec.type == "wells") {
    require(v.is_array() && !v.empty(), path + ": expected a non-empty well array");
    for (const json& w : v) {
      require(w.is_object(), path + ": each well must be an object");
      for (const auto& [k, unused] : w.items()) {
        (void)unused;
        require(k == "center" || k == "width" || k == "amplitude",
                path + ": unknown well key \"" + k + "\"");
      }
      require(w.contains("center") && w["center"].is_array() &&
                  (w["center"].size() == 1 || w["center"].size() == 2),
              path + ": well center must be a 1D or 2D number array");
      for (const json& c : w["center"])
        require(c.is_number() && std::isfinite(c.get<double>()),
                path + ": well center entries must be finite numbers");
      for (const char* k : {"width", "amplitude"}) {
        require(w.contains(k) && w[k].is_number(), path + ": well needs a numeric " +
                                                       std::string(k));
        require(w[k].get<double>() > 0.0 && std::isfinite(w[k].get<double>()),
                path + ": well " + std::string(k) + " must be positive");
      }
    }
  } else {
    throw ValidationError(path + ": unhandled parameter type " + spec.type);
  }
}

// ---- typed parameter access on a resolved config ----

double num(const ExperimentConfig& c, const char* k) {
  return c.params.at(k).get<double>();
}
long long whole(const ExperimentConfig& c, const char* k) {
  return c.params.at(k).get<long long>();
}
bool flag(const ExperimentConfig& c, const char* k) {
  return c.params.at(k).get<bool>();
}
std::string text(const ExperimentConfig& c, const char* k) {
  return c.params.at(k).get<std::string>();
}
std::vector<double> number_list(const ExperimentConfig& c, const char* k) {
  return c.params.at(k).get<std::vector<double>>();
}
Landscape landscape_param(const ExperimentConfig& c, const char* k) {
  std::vector<GaussianWell> wells;
  for (const json& w : c.params.at(k)) {
    GaussianWell g;
    g.center = w.at("center").get<std::vector<double>>();
    g.width = w.at("width").get<double>();
    g.amplitude = w.at("amplitude").get<double>();
    wells.push_back(std::move(g));
  }
  return Landscape(std::move(wells));
}
InteractionParams interaction_param(const ExperimentConfig& c) {
  InteractionParams p;
  p.push_strength = num(c, "push_strength");
  p.push_range = num(c, "push_range");
  p.push_sharpness = num(c, "push_sharpness");
  p.yukawa_strength = num(c, "yukawa_strength");
  p.yukawa_decay = num(c, "yukawa_decay");
  p.pursuit_speed = num(c, "pursuit_speed");
  return p;
}

// ---- artifact writers ----

class CsvFile {
 public:
  CsvFile(const fs::path& path, const ExperimentConfig& cfg, const std::string& columns)
      : os_(path, std::ios::binary) {
    require(static_cast<bool>(os_), "cannot write artifact: " + path.string());
    os_ << "# config_hash=" << config_hash(cfg) << " seed=" << cfg.seed << "\n"
        << columns << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }

 private:
  std::ofstream os_;
};

std::string fm(double v) { return format_float(v); }
std::string fm(long long v) { return std::to_string(v); }

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "cannot write artifact: " + path.string());
  os << j.dump(2) << "\n";
}

// ---- runners ----

std::vector<std::string> run_sgld_fraction(const ExperimentConfig& cfg,
                                           const fs::path& dir) {
  const Landscape land = landscape_param(cfg, "wells");
  SgldConfig base;
  base.learning_rate = num(cfg, "learning_rate");
  base.max_iterations = whole(cfg, "max_iterations");
  base.capture_patience = whole(cfg, "capture_patience");
  base.x0 = number_list(cfg, "x0");
  const auto points = wide_well_fraction(land, base, number_list(cfg, "temperatures"),
                                         whole(cfg, "runs"), cfg.seed);
  CsvFile csv(dir / "fraction.csv", cfg,
              "temperature,captured_wide,captured_any,total_runs,fraction");
  for (const FractionPoint& p : points)
    csv.row({fm(p.temperature), fm(static_cast<long long>(p.captured_wide)),
             fm(static_cast<long long>(p.captured_any)),
             fm(static_cast<long long>(p.total_runs)),
             p.defined ? fm(p.fraction) : kNa});
  return {"fraction.csv"};
}

std::vector<std::string> run_sgld_capture_curve(const ExperimentConfig& cfg,
                                                const fs::path& dir) {
  const Landscape land = landscape_param(cfg, "wells");
  SgldConfig base;
  base.learning_rate = num(cfg, "learning_rate");
  base.max_iterations = whole(cfg, "max_iterations");
  base.capture_patience = whole(cfg, "capture_patience");
  base.x0 = number_list(cfg, "x0");
  const auto curves = capture_fraction_vs_iteration(
      land, base, number_list(cfg, "noise_scales"), whole(cfg, "runs"), cfg.seed);
  CsvFile csv(dir / "capture_curve.csv", cfg, "noise_scale,iteration,fraction");
  for (const CaptureCurve& c : curves)
    for (std::size_t k = 0; k < c.fraction.size(); ++k)
      csv.row({fm(c.noise_scale), fm(static_cast<long long>(k)), fm(c.fraction[k])});
  return {"capture_curve.csv"};
}

std::vector<std::string> run_fp_verify(const ExperimentConfig& cfg, const fs::path& dir) {
  const Landscape land = landscape_param(cfg, "wells");
  require(land.dimension() == 1, "fp_verify needs a 1D landscape");
  GridSpec spec;
  spec.bounds = {{num(cfg, "grid_lo"), num(cfg, "grid_hi")}};
  spec.nodes = {static_cast<int>(whole(cfg, "nodes"))};
  const double theta = num(cfg, "theta");
  const double dt = num(cfg, "dt");
  const long long steps = whole(cfg, "steps");
  const long long stride = whole(cfg, "record_stride");
  const PotentialFn f = [land](std::span<const double> x) { return -land.value(x); };

  const DensityGrid initial = make_gibbs_density(spec, f, 1.0 / theta);
  DensityGrid u = initial;
  CsvFile csv(dir / "drift.csv", cfg, "step,time,l1_drift,mass");
  csv.row({fm(0LL), fm(0.0), fm(0.0), fm(u.mass())});
  for (long long done = 0; done < steps;) {
    const long long chunk = std::min(stride, steps - done);
    fokker_planck_evolve(u, f, theta, dt, chunk);
    done += chunk;
    csv.row({fm(done), fm(done * dt), fm(u.l1_distance(initial)), fm(u.mass())});
  }

  std::ofstream dens(dir / "density.csv", std::ios::binary);
  require(static_cast<bool>(dens), "cannot write artifact: density.csv");
  const std::string comment =
      "config_hash=" + config_hash(cfg) + " seed=" + std::to_string(cfg.seed);
  u.write_csv(dens, std::span<const std::string>(&comment, 1));

  write_json_file(dir / "summary.json",
                  json{{"final_l1", u.l1_distance(initial)},
                       {"final_mass", u.mass()},
                       {"steps", steps}});
  return {"drift.csv", "density.csv", "summary.json"};
}

std::vector<std::string> run_eyring_mfpt(const ExperimentConfig& cfg,
                                         const fs::path& dir) {
  const Landscape land = landscape_param(cfg, "wells");
  require(land.dimension() == 1 && land.well_count() == 2,
          "eyring_mfpt needs exactly two 1D wells");
  const std::size_t wide = land.widest_well();
  const std::size_t narrow = 1 - wide;
  const double theta = num(cfg, "theta");
  const int runs = static_cast<int>(whole(cfg, "runs"));
  const long long max_steps = whole(cfg, "max_steps");
  const double dt = num(cfg, "dt");

  const EscapeStats w = empirical_escape_rate(land, wide, theta, runs, max_steps, dt,
                                              cfg.seed);
  const EscapeStats n = empirical_escape_rate(land, narrow, theta, runs, max_steps, dt,
                                              cfg.seed + 1);

  CsvFile csv(dir / "mfpt.csv", cfg,
              "well,center,width,runs,escaped,censored,mfpt_mean,mfpt_se");
  auto emit = [&](const char* label, std::size_t i, const EscapeStats& s) {
    csv.row({label, fm(land.well(i).center[0]), fm(land.well(i).width),
             fm(static_cast<long long>(s.runs)), fm(static_cast<long long>(s.escaped)),
             s.censored ? "1" : "0", s.escaped > 0 ? fm(s.mfpt_mean) : kNa,
             s.escaped > 1 ? fm(s.mfpt_se) : kNa});
  };
  emit("wide", wide, w);
  emit("narrow", narrow, n);

  json summary{{"mfpt_wide", w.escaped > 0 ? json(w.mfpt_mean) : json()},
               {"mfpt_narrow", n.escaped > 0 ? json(n.mfpt_mean) : json()},
               {"censored", w.censored || n.censored}};
  summary["rate_ratio_narrow_over_wide"] =
      (w.escaped > 0 && n.escaped > 0 && n.mfpt_mean > 0.0)
          ? json(w.mfpt_mean / n.mfpt_mean)
          : json();
  write_json_file(dir / "summary.json", summary);
  return {"mfpt.csv", "summary.json"};
}

std::vector<std::string> run_gan_trajectory(const ExperimentConfig& cfg,
                                            const fs::path& dir) {
  DiscriminatorParams d{num(cfg, "disc_center"), num(cfg, "disc_log_width"),
                        num(cfg, "disc_gain"), num(cfg, "disc_offset")};
  GeneratorParams g{num(cfg, "gen_mean"), num(cfg, "gen_log_sigma")};
  const std::vector<double> sample = number_list(cfg, "sample");
  const double temperature = num(cfg, "temperature");
  const double dt = num(cfg, "dt");
  const long long steps = whole(cfg, "steps");
  const long long stride = whole(cfg, "record_stride");
  GanQuadrature quad{static_cast<int>(whole(cfg, "quad_nodes")),
                     num(cfg, "quad_half_width")};
  quad.validate();

  // Gaussian fitted to the sample, for the KL(sample fit || generator) column.
  double s_mean = 0.0, s_sd = 0.0;
  if (sample.size() >= 2) {
    s_mean = mean(sample);
    double acc = 0.0;
    for (double z : sample) acc += (z - s_mean) * (z - s_mean);
    s_sd = std::sqrt(acc / static_cast<double>(sample.size()));
  }
  const bool kl_defined = sample.size() >= 2 && s_sd > 0.0;

  RngStream rng(cfg.seed, 0);
  CsvFile csv(dir / "trajectory.csv", cfg,
              "t,disc_center,disc_log_width,disc_gain,disc_offset,gen_mean,"
              "gen_log_sigma,value,data_term,generator_term,kl_sample_generator");
  auto emit = [&](long long k) {
    const GanValue v = gan_value(d, g, sample, quad);
    csv.row({fm(k * dt), fm(d.center), fm(d.log_width), fm(d.gain), fm(d.offset),
             fm(g.mean), fm(g.log_sigma), fm(v.total), fm(v.data_term),
             fm(v.generator_term),
             kl_defined
                 ? fm(kl_divergence(s_mean, s_sd, g.mean, std::exp(g.log_sigma)))
                 : kNa});
  };
  emit(0);
  for (long long k = 1; k <= steps; ++k) {
    gan_sgld_step(d, g, sample, temperature, dt, rng, quad);
    if (k % stride == 0 || k == steps) emit(k);
  }
  return {"trajectory.csv"};
}

std::vector<std::string> run_bilinear_check(const ExperimentConfig& cfg,
                                            const fs::path& dir) {
  const double omega = num(cfg, "omega");
  const double x0 = num(cfg, "x0");
  const double y0 = num(cfg, "y0");
  const double dt = num(cfg, "dt");
  const long long steps = whole(cfg, "steps");
  const long long stride = whole(cfg, "record_stride");
  const auto points = bilinear_example_run(omega, x0, y0, dt, steps);

  CsvFile csv(dir / "trajectory.csv", cfg, "t,x,y,exact_x,exact_y,abs_error");
  double max_error = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const BilinearPoint& p = points[k];
    const double ex = x0 * std::cos(omega * p.time) + y0 * std::sin(omega * p.time);
    const double ey = -x0 * std::sin(omega * p.time) + y0 * std::cos(omega * p.time);
    const double err = std::max(std::abs(p.x - ex), std::abs(p.y - ey));
    max_error = std::max(max_error, err);
    if (k % static_cast<std::size_t>(stride) == 0 || k + 1 == points.size())
      csv.row({fm(p.time), fm(p.x), fm(p.y), fm(ex), fm(ey), fm(err)});
  }
  write_json_file(dir / "summary.json",
                  json{{"max_error", max_error}, {"steps", steps}});
  return {"trajectory.csv", "summary.json"};
}

const char* regime_name(PursuitRegime r) {
  switch (r) {
    case PursuitRegime::Pushout: return "pushout";
    case PursuitRegime::Oscillation: return "oscillation";
    case PursuitRegime::Escape: return "escape";
    default: return "unsettled";
  }
}

std::vector<std::string> run_predator_prey(const ExperimentConfig& cfg,
                                           const fs::path& dir) {
  const Landscape land = landscape_param(cfg, "wells");
  require(land.dimension() == 2, "predator_prey needs a 2D landscape");
  PursuitConfig pc;
  pc.prey_start = number_list(cfg, "prey_start");
  pc.predator_start = number_list(cfg, "predator_start");
  pc.interaction = interaction_param(cfg);
  pc.dt = num(cfg, "dt");
  pc.steps = whole(cfg, "steps");
  pc.record_stride = whole(cfg, "record_stride");

  const PursuitTrajectory traj = pursuit_run(land, pc);
  const RegimeReport report = classify_regime(traj, land);

  CsvFile csv(dir / "trajectory.csv", cfg,
              "t,prey_x,prey_y,predator_x,predator_y,separation,objective");
  for (const PursuitSample& s : traj.samples)
    csv.row({fm(s.time), fm(s.prey[0]), fm(s.prey[1]), fm(s.predator[0]),
             fm(s.predator[1]), fm(s.separation), fm(s.objective)});

  write_json_file(
      dir / "regime.json",
      json{{"label", regime_name(report.label)},
           {"source_well", report.source_well >= 0 ? json(report.source_well) : json()},
           {"terminal_well",
            report.terminal_well >= 0 ? json(report.terminal_well) : json()},
           {"window_amplitude", report.window_amplitude},
           {"window_sign_changes", report.window_sign_changes},
           {"separation_p5", report.separation_p5},
           {"separation_p95", report.separation_p95},
           {"truncated", traj.truncated},
           {"step_limit_exceeded", traj.step_limit_exceeded},
           {"coincidence", traj.coincidence}});
  return {"trajectory.csv", "regime.json"};
}

std::vector<std::string> run_oscillation_solve(const ExperimentConfig& cfg,
                                               const fs::path& dir) {
  const LimitCycleSolution sol = limiting_oscillation(
      num(cfg, "depth"), num(cfg, "width"), interaction_param(cfg), num(cfg, "angle"));
  write_json_file(dir / "solution.json",
                  json{{"feasible", sol.feasible},
                       {"prey_radius", sol.prey_radius},
                       {"predator_radius", sol.predator_radius},
                       {"separation", sol.separation},
                       {"residuals", {sol.residual[0], sol.residual[1], sol.residual[2]}},
                       {"angle", num(cfg, "angle")}});
  return {"solution.json"};
}

std::vector<std::string> run_branching(const ExperimentConfig& cfg, const fs::path& dir) {
  SuppressionConfig sc;
  sc.peak_separation = num(cfg, "peak_separation");
  sc.narrow_spread = num(cfg, "narrow_spread");
  sc.wide_spread = num(cfg, "wide_spread");
  sc.narrow_points = static_cast<int>(whole(cfg, "narrow_points"));
  sc.wide_points = static_cast<int>(whole(cfg, "wide_points"));
  sc.disc_log_width = num(cfg, "disc_log_width");
  sc.disc_gain = num(cfg, "disc_gain");
  sc.disc_offset = num(cfg, "disc_offset");
  sc.gen_log_sigma = num(cfg, "gen_log_sigma");
  sc.initial_discs_per_peak = static_cast<int>(whole(cfg, "initial_discs_per_peak"));
  sc.initial_generators = static_cast<int>(whole(cfg, "initial_generators"));
  sc.rates.generator_death_rate = num(cfg, "generator_death_rate");
  sc.rates.disc_replication_scale = num(cfg, "disc_replication_scale");
  sc.rates.disc_death_scale = num(cfg, "disc_death_scale");
  sc.rates.gen_replication_scale = num(cfg, "gen_replication_scale");
  sc.rates.population_cap = whole(cfg, "population_cap");
  sc.temperature = num(cfg, "temperature");
  sc.dt = num(cfg, "dt");
  sc.steps = static_cast<int>(whole(cfg, "steps"));
  sc.measure_fraction = num(cfg, "measure_fraction");
  sc.quadrature = {static_cast<int>(whole(cfg, "quad_nodes")),
                   num(cfg, "quad_half_width")};
  sc.validate();

  const double m_narrow = -0.5 * sc.peak_separation;
  const double m_wide = 0.5 * sc.peak_separation;
  const long long stride = whole(cfg, "record_stride");
  const int window = std::max(
      1, static_cast<int>(std::lround(sc.measure_fraction * sc.steps)));
  const int window_start = sc.steps - window;

  RngStream sample_rng(cfg.seed, 0);
  const std::vector<double> sample = suppression_sample(sc, sample_rng);
  PopulationState state =
      suppression_initial_state(sc, flag(cfg, "generators_enabled"));
  RngStream rng(cfg.seed, 1);
  const MobilityMask mask = suppression_mobility();

  CsvFile csv(dir / "census.csv", cfg,
              "t,discriminators,generators,narrow_fraction,wide_fraction");
  auto emit = [&](int k) {
    const PeakCensus c = discriminator_census(state, m_narrow, m_wide);
    const long long total = c.near_first + c.near_second;
    csv.row({fm(k * sc.dt), fm(static_cast<long long>(state.discriminators.size())),
             fm(static_cast<long long>(state.generators.size())),
             total > 0 ? fm(static_cast<double>(c.near_first) / total) : kNa,
             total > 0 ? fm(static_cast<double>(c.near_second) / total) : kNa});
  };
  emit(0);

  long long replications = 0, deaths = 0, refused = 0;
  long long window_narrow = 0, window_total = 0;
  double max_probability = 0.0;
  bool extinct = false;
  for (int k = 0; k < sc.steps; ++k) {
    const BranchingDiagnostics diag = branching_step(state, sample, sc.rates,
                                                     sc.temperature, sc.dt, rng,
                                                     sc.quadrature, mask);
    replications += diag.replications;
    deaths += diag.deaths;
    refused += diag.refused_replications;
    max_probability = std::max(max_probability, diag.max_event_probability);
    if (state.discriminators.empty()) extinct = true;
    if (k >= window_start) {
      const PeakCensus c = discriminator_census(state, m_narrow, m_wide);
      window_narrow += c.near_first;
      window_total += c.near_first + c.near_second;
    }
    if ((k + 1) % stride == 0 || k + 1 == sc.steps) emit(k + 1);
  }

  std::ofstream events(dir / "events.jsonl", std::ios::binary);
  require(static_cast<bool>(events), "cannot write artifact: events.jsonl");
  for (const PopulationEvent& e : state.events) {
    const char* type = e.type == PopulationEventType::Replicate          ? "replicate"
                       : e.type == PopulationEventType::Die              ? "die"
                                                                         : "replication_refused";
    json line{{"time", e.time},
              {"type", type},
              {"kind", e.kind == ParticleKind::Discriminator ? "discriminator"
                                                             : "generator"},
              {"particle_id", e.particle_id}};
    line["child_id"] =
        e.type == PopulationEventType::Replicate ? json(e.child_id) : json();
    events << line.dump() << "\n";
  }

  write_json_file(
      dir / "summary.json",
      json{{"final_discriminators", state.discriminators.size()},
           {"final_generators", state.generators.size()},
           {"replications", replications},
           {"deaths", deaths},
           {"refused_replications", refused},
           {"max_event_probability", max_probability},
           {"window_narrow_fraction",
            window_total > 0 ? json(static_cast<double>(window_narrow) / window_total)
                             : json()},
           {"discriminators_extinct", extinct}});
  return {"census.csv", "events.jsonl", "summary.json"};
}

std::vector<std::string> run_regression(const ExperimentConfig& cfg,
                                        const fs::path& dir) {
  const TabularDataset data = load_dataset(text(cfg, "csv"));
  const DatasetSplit split = split_dataset(data, num(cfg, "train_fraction"), cfg.seed);
  const InteractionParams interaction = interaction_param(cfg);
  const double gd_lr = num(cfg, "gd_learning_rate");
  const int gd_iters = static_cast<int>(whole(cfg, "gd_iterations"));
  const double pp_dt = num(cfg, "pp_dt");
  const int pp_iters = static_cast<int>(whole(cfg, "pp_iterations"));

  CsvFile csv(dir / "table.csv", cfg,
              "method,degree,train_mse,test_mse,test_accuracy,iterations");
  json reports = json::array();
  for (int degree : {1, 2}) {
    const FitResult gd = fit_gd(degree, split.train, split.test, gd_lr, gd_iters);
    const FitResult pp =
        fit_pp(degree, split.train, split.test, interaction, pp_dt, pp_iters);
    const json gd_cfg{{"degree", degree}, {"learning_rate", gd_lr}};
    json pp_cfg{{"degree", degree}, {"dt", pp_dt}};
    pp_cfg["interaction"] = {{"push_strength", interaction.push_strength},
                             {"push_range", interaction.push_range},
                             {"push_sharpness", interaction.push_sharpness},
                             {"yukawa_strength", interaction.yukawa_strength},
                             {"yukawa_decay", interaction.yukawa_decay},
                             {"pursuit_speed", interaction.pursuit_speed}};
    const FitReport gd_rep = summarize_fit("gd", gd, split.train, split.test, gd_iters,
                                           gd_cfg.dump());
    const FitReport pp_rep = summarize_fit("pp", pp, split.train, split.test, pp_iters,
                                           pp_cfg.dump());
    for (const FitReport& r : {gd_rep, pp_rep}) {
      csv.row({r.method, fm(static_cast<long long>(degree)), fm(r.train_mse),
               fm(r.test_mse), fm(r.test_accuracy),
               fm(static_cast<long long>(r.iterations))});
      reports.push_back(json{{"method", r.method},
                             {"degree", degree},
                             {"train_mse", r.train_mse},
                             {"test_mse", r.test_mse},
                             {"test_accuracy", r.test_accuracy},
                             {"iterations", r.iterations},
                             {"config", r.config}});
    }
  }
  write_json_file(dir / "reports.json", reports);
  return {"table.csv", "reports.json"};
}

using Runner = std::vector<std::string> (*)(const ExperimentConfig&, const fs::path&);

const std::map<std::string, Runner>& runner_map() {
  static const std::map<std::string, Runner> m = {
      {"sgld_fraction", run_sgld_fraction},
      {"sgld_capture_curve", run_sgld_capture_curve},
      {"fp_verify", run_fp_verify},
      {"eyring_mfpt", run_eyring_mfpt},
      {"gan_trajectory", run_gan_trajectory},
      {"bilinear_check", run_bilinear_check},
      {"predator_prey", run_predator_prey},
      {"oscillation_solve", run_oscillation_solve},
      {"branching", run_branching},
      {"regression", run_regression},
  };
  return m;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, unused] : schema_map()) {
      (void)unused;
      out.push_back(k);
    }
    return out;
  }();
  return names;
}

const std::vector<ParamSpec>& experiment_schema(const std::string& experiment) {
  const auto it = schema_map().find(experiment);
  require(it != schema_map().end(), "unknown experiment kind: " + experiment);
  return it->second;
}

ExperimentConfig resolve_config(const nlohmann::json& raw) {
  require(raw.is_object(), "config root must be a JSON object");
  for (const auto& [key, unused] : raw.items()) {
    (void)unused;
    require(key == "experiment" || key == "seed" || key == "output" || key == "params",
            "unknown config key \"" + key + "\"");
  }
  require(raw.contains("experiment") && raw["experiment"].is_string(),
          "config needs an \"experiment\" string");
  ExperimentConfig cfg;
  cfg.experiment = raw["experiment"].get<std::string>();
  const auto& schema = experiment_schema(cfg.experiment);

  require(raw.contains("seed") && raw["seed"].is_number_integer() &&
              raw["seed"].get<double>() >= 0,
          "config needs a nonnegative integer \"seed\"");
  cfg.seed = raw["seed"].get<std::uint64_t>();

  cfg.output = cfg.experiment;
  if (raw.contains("output")) {
    require(raw["output"].is_string() && !raw["output"].get<std::string>().empty(),
            "\"output\" must be a non-empty string");
    cfg.output = raw["output"].get<std::string>();
  }

  json given = json::object();
  if (raw.contains("params")) {
    require(raw["params"].is_object(), "\"params\" must be an object");
    given = raw["params"];
  }
  for (const auto& [key, unused] : given.items()) {
    (void)unused;
    const bool known = std::any_of(schema.begin(), schema.end(),
                                   [&](const ParamSpec& s) { return s.name == key; });
    require(known, "unknown parameter \"" + key + "\" for experiment " + cfg.experiment);
  }

  cfg.params = json::object();
  for (const ParamSpec& spec : schema) {
    if (given.contains(spec.name)) {
      check_value(given[spec.name], spec, "params." + spec.name);
      cfg.params[spec.name] = given[spec.name];
    } else {
      cfg.params[spec.name] = spec.fallback;
      cfg.defaulted.push_back(spec.name);
    }
  }
  return cfg;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const json canonical{
      {"experiment", cfg.experiment}, {"params", cfg.params}, {"seed", cfg.seed}};
  const std::string text = canonical.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json RunRecord::to_json() const {
  return json{{"experiment", experiment},
              {"config_hash", config_hash},
              {"version", version},
              {"wall_clock_seconds", wall_clock_seconds},
              {"artifacts", artifacts}};
}

RunRecord run_experiment(const ExperimentConfig& cfg, const std::string& out_root) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fs::path(out_root.empty() ? "." : out_root) / cfg.output;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, "cannot create output directory: " + dir.string());

  const auto it = runner_map().find(cfg.experiment);
  require(it != runner_map().end(), "unknown experiment kind: " + cfg.experiment);
  std::vector<std::string> files = it->second(cfg, dir);

  write_json_file(dir / "manifest.json", json{{"experiment", cfg.experiment},
                                              {"seed", cfg.seed},
                                              {"config_hash", config_hash(cfg)},
                                              {"version", kVersion},
                                              {"params", cfg.params},
                                              {"artifacts", files}});
  files.push_back("manifest.json");

  RunRecord rec;
  rec.experiment = cfg.experiment;
  rec.config_hash = config_hash(cfg);
  rec.version = kVersion;
  rec.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const std::string& f : files) rec.artifacts.push_back((dir / f).string());
  return rec;
}

nlohmann::json ValidationReport::to_json() const {
  json out{{"valid", valid}};
  if (!experiment.empty()) out["experiment"] = experiment;
  if (!valid) {
    out["error"] = error;
    return out;
  }
  json list = json::array();
  for (const Defaulted& d : defaults)
    list.push_back(
        json{{"name", d.name}, {"value", d.value}, {"provenance", d.provenance}});
  out["defaults"] = list;
  return out;
}

ValidationReport validate_config(const nlohmann::json& raw) {
  ValidationReport rep;
  try {
    const ExperimentConfig cfg = resolve_config(raw);
    rep.valid = true;
    rep.experiment = cfg.experiment;
    const auto& schema = experiment_schema(cfg.experiment);
    for (const std::string& name : cfg.defaulted) {
      const auto it = std::find_if(schema.begin(), schema.end(),
                                   [&](const ParamSpec& s) { return s.name == name; });
      rep.defaults.push_back({name, it->fallback, it->provenance});
    }
  } catch (const std::exception& e) {
    rep.valid = false;
    rep.error = e.what();
  }
  return rep;
}

}  // namespace flatsim
