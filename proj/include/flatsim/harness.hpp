#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace flatsim {

/// One schema row: a parameter an experiment accepts, its JSON type, the value
/// used when the config omits it, and where that value comes from
/// ("reference" = quoted from the source experiments, "tool-default" =
/// artifact-chosen constant). The per-experiment tables are the single
/// defaults ledger; nothing is defaulted inline in the runners.
struct ParamSpec {
  std::string name;
  std::string type;  // "number" | "integer" | "boolean" | "string" | "numbers" | "wells"
  nlohmann::json fallback;
  std::string provenance;  // "reference" | "tool-default"
  std::string doc;
  double min_value = -1e308;  // lower bound for number/integer/numbers entries
  bool exclusive_min = false;
};

/// Fully resolved run request: every parameter present (defaults applied),
/// canonical and ready to hash.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output;            // artifact directory under the output root
  nlohmann::json params;         // effective values for every schema entry
  std::vector<std::string> defaulted;  // parameter names filled from the table
};

/// All experiment kinds, in listing order.
const std::vector<std::string>& experiment_names();

/// Parameter table for one kind; unknown kinds are rejected.
const std::vector<ParamSpec>& experiment_schema(const std::string& experiment);

/// Envelope + schema check of a raw config document. Allowed envelope keys:
/// "experiment" (required), "seed" (required, nonnegative integer), "output"
/// (optional string), "params" (optional object of known keys). Unknown keys
/// anywhere are rejected with their path.
ExperimentConfig resolve_config(const nlohmann::json& raw);

/// FNV-1a (64-bit) over the canonical serialization {experiment, params, seed}
/// with sorted keys; the output directory does not affect it. 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Shortest-width %.17g rendering used for every float in CSV artifacts.
std::string format_float(double v);

struct RunRecord {
  std::string experiment;
  std::string config_hash;
  std::string version;
  double wall_clock_seconds = 0.0;
  std::vector<std::string> artifacts;  // paths of the files written

  nlohmann::json to_json() const;
};

/// Executes the experiment and writes its artifacts plus manifest.json under
/// out_root/output. Artifact files (manifest included) are byte-identical for
/// identical config + seed; timing lives only in the returned record.
RunRecord run_experiment(const ExperimentConfig& cfg, const std::string& out_root);

/// validate-only result: every defaulted parameter with value and provenance.
struct ValidationReport {
  bool valid = false;
  std::string experiment;
  std::string error;  // set when invalid
  struct Defaulted {
    std::string name;
    nlohmann::json value;
    std::string provenance;
  };
  std::vector<Defaulted> defaults;

  nlohmann::json to_json() const;
};

/// Full schema check without execution; never throws.
ValidationReport validate_config(const nlohmann::json& raw);

}  // namespace flatsim
