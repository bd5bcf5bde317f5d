#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfs/photonics.hpp"

namespace nfs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DesignRequest {
  Polarization final_polarization = Polarization::sigma;
  std::optional<std::pair<double, double>> window;  // s
};

// One scenario, parsed from a strict JSON file: unknown keys anywhere are
// rejected and units are explicit in the key names.
struct ScenarioConfig {
  NuclearConstants nuclear;
  HyperfineConfig hyperfine = calibrated_config();
  Geometry geometry;
  SampleConfig sample;
  TimeGrid grid;
  std::optional<SwitchSequence> events;
  std::optional<DesignRequest> design;
  std::optional<WindowSpec> windows;
  InterferometerConfig interferometer;
  BellSettings bell;
  int bell_scan_points = 73;
  int max_order = 8;
  double tol_rel = 1e-8;
  std::vector<std::string> scan_configs;  // `scan` subcommand only
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text);

// Subcommand drivers; return process exit codes:
// 0 ok, 2 config/schema violation, 3 no design candidate, 4 zero-photon
// windows.
int cmd_simulate(const std::string& config_path, const std::string& out_dir);
int cmd_design(const std::string& config_path, const std::string& out_dir);
int cmd_scan(const std::string& config_path, const std::string& out_dir);
int cmd_entangle(const std::string& config_path, const std::string& out_dir);

}  // namespace nfs
