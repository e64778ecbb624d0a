#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "flatsim/common.hpp"
#include "flatsim/harness.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw flatsim::ValidationError("cannot read config file: " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw flatsim::ValidationError("config is not valid JSON: " + std::string(e.what()));
  }
}

int fail(int code, const char* type, const std::string& message) {
  const json err{{"error", json{{"code", code}, {"type", type}, {"message", message}}}};
  std::cout << err.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatsim: seeded learning-dynamics experiments with file artifacts"};
  app.require_subcommand(1);

  std::string run_path;
  CLI::App* cmd_run = app.add_subcommand("run", "execute a config and write artifacts");
  cmd_run->add_option("config", run_path, "JSON config file")->required();

  std::string check_path;
  CLI::App* cmd_validate =
      app.add_subcommand("validate", "schema-check a config without executing");
  cmd_validate->add_option("config", check_path, "JSON config file")->required();

  CLI::App* cmd_list = app.add_subcommand(
      "list-experiments", "print every experiment kind and its parameter table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_list->parsed()) {
      json out = json::array();
      for (const std::string& name : flatsim::experiment_names()) {
        json params = json::array();
        for (const flatsim::ParamSpec& s : flatsim::experiment_schema(name))
          params.push_back(json{{"name", s.name},
                                {"type", s.type},
                                {"default", s.fallback},
                                {"provenance", s.provenance},
                                {"doc", s.doc}});
        out.push_back(json{{"experiment", name}, {"params", params}});
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (cmd_validate->parsed()) {
      const flatsim::ValidationReport rep =
          flatsim::validate_config(load_config(check_path));
      if (!rep.valid) return fail(2, "validation", rep.error);
      std::cout << rep.to_json().dump(2) << "\n";
      return 0;
    }
    const flatsim::ExperimentConfig cfg = flatsim::resolve_config(load_config(run_path));
    const char* env = std::getenv("FLATSIM_OUT_ROOT");
    const flatsim::RunRecord rec = flatsim::run_experiment(cfg, env ? env : "out");
    std::cout << rec.to_json().dump(2) << "\n";
    return 0;
  } catch (const flatsim::ValidationError& e) {
    return fail(2, "validation", e.what());
  } catch (const std::exception& e) {
    return fail(3, "runtime", e.what());
  }
}
