#include "nfs/config.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace nfs {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config error at " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) fail(where, "unknown key '" + key + "'");
  }
}

double num(const json& obj, const std::string& where, const char* key,
           double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
  return obj[key].get<double>();
}

std::pair<double, double> window_ns(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(where, "expected [t_lo_ns, t_hi_ns]");
  return {v[0].get<double>() * 1e-9, v[1].get<double>() * 1e-9};
}

Eigen::Vector3d vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where, "expected a 3-vector");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

void parse_nuclear(const json& j, ScenarioConfig& cfg) {
  check_keys(j, "nuclear", {"transition_energy_keV", "lifetime_tau_ns", "ic_ratio"});
  cfg.nuclear.E0_eV = num(j, "nuclear", "transition_energy_keV", 14.413) * 1e3;
  cfg.nuclear.tau_s = num(j, "nuclear", "lifetime_tau_ns", 141.0) * 1e-9;
  cfg.nuclear.ic_ratio = num(j, "nuclear", "ic_ratio", 8.0);
}

void parse_hyperfine(const json& j, ScenarioConfig& cfg) {
  check_keys(j, "hyperfine",
             {"mode", "field_tesla", "g_factor_ground", "g_factor_excited",
              "override_lines"});
  const std::string mode = j.value("mode", "calibrated");
  if (mode == "calibrated") {
    cfg.hyperfine = calibrated_config();
  } else if (mode == "zeeman") {
    cfg.hyperfine = HyperfineConfig{};
    cfg.hyperfine.field_tesla = num(j, "hyperfine", "field_tesla", 0.0);
    cfg.hyperfine.g_factor_ground = num(j, "hyperfine", "g_factor_ground", 0.0);
    cfg.hyperfine.g_factor_excited = num(j, "hyperfine", "g_factor_excited", 0.0);
  } else if (mode == "override") {
    if (!j.contains("override_lines") || !j["override_lines"].is_array() ||
        j["override_lines"].size() != 6)
      fail("hyperfine.override_lines", "expected exactly six line records");
    cfg.hyperfine = HyperfineConfig{};
    std::array<OverrideLine, 6> ov{};
    int i = 0;
    for (const auto& rec : j["override_lines"]) {
      const std::string where = "hyperfine.override_lines";
      check_keys(rec, where, {"two_m_g", "two_m_e", "omega_rad_per_s"});
      ov[i].two_m_g = static_cast<int>(num(rec, where, "two_m_g", 0));
      ov[i].two_m_e = static_cast<int>(num(rec, where, "two_m_e", 0));
      ov[i].omega = num(rec, where, "omega_rad_per_s", 0.0);
      ++i;
    }
    cfg.hyperfine.override_frequencies = ov;
  } else {
    fail("hyperfine.mode", "expected calibrated | zeeman | override");
  }
}

void parse_geometry(const json& j, ScenarioConfig& cfg) {
  check_keys(j, "geometry", {"beam_direction", "polarization", "quantization_axis"});
  if (j.contains("beam_direction"))
    cfg.geometry.k_hat = vec3(j["beam_direction"], "geometry.beam_direction").normalized();
  if (j.contains("polarization"))
    cfg.geometry.e0 = vec3(j["polarization"], "geometry.polarization").normalized();
  if (j.contains("quantization_axis")) {
    const Eigen::Vector3d z =
        vec3(j["quantization_axis"], "geometry.quantization_axis").normalized();
    // build a right-handed frame with the requested third column
    Eigen::Vector3d seed = std::abs(z.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                 : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d x = (seed - seed.dot(z) * z).normalized();
    cfg.geometry.frame.col(0) = x;
    cfg.geometry.frame.col(1) = z.cross(x);
    cfg.geometry.frame.col(2) = z;
  }
}

void parse_sequence(const json& j, ScenarioConfig& cfg) {
  check_keys(j, "sequence", {"events", "design"});
  if (j.contains("events") == j.contains("design"))
    fail("sequence", "provide exactly one of 'events' or 'design'");
  if (j.contains("events")) {
    SwitchSequence seq;
    for (const auto& e : j["events"]) {
      check_keys(e, "sequence.events[]", {"t_ns", "alpha_deg", "beta_deg", "gamma_deg"});
      SwitchingEvent ev;
      ev.time = num(e, "sequence.events[]", "t_ns", 0.0) * 1e-9;
      ev.rotation.alpha = num(e, "sequence.events[]", "alpha_deg", 0.0) * kDeg;
      ev.rotation.beta = num(e, "sequence.events[]", "beta_deg", 0.0) * kDeg;
      ev.rotation.gamma = num(e, "sequence.events[]", "gamma_deg", 0.0) * kDeg;
      seq.events.push_back(ev);
    }
    try {
      seq.validate();
    } catch (const std::exception& ex) {
      fail("sequence.events", ex.what());
    }
    cfg.events = seq;
  } else {
    const auto& d = j["design"];
    check_keys(d, "sequence.design", {"final_polarization", "window_ns"});
    DesignRequest req;
    const std::string pol = d.value("final_polarization", "sigma");
    if (pol == "sigma")
      req.final_polarization = Polarization::sigma;
    else if (pol == "pi")
      req.final_polarization = Polarization::pi;
    else
      fail("sequence.design.final_polarization", "expected sigma | pi");
    if (d.contains("window_ns"))
      req.window = window_ns(d["window_ns"], "sequence.design.window_ns");
    cfg.design = req;
  }
}

ScenarioConfig parse_json(const json& root) {
  check_keys(root, "<root>",
             {"nuclear", "hyperfine", "geometry", "sample", "grid", "sequence",
              "solver", "windows", "interferometer", "bell", "scan"});
  ScenarioConfig cfg;
  if (root.contains("nuclear")) parse_nuclear(root["nuclear"], cfg);
  if (root.contains("hyperfine")) parse_hyperfine(root["hyperfine"], cfg);
  if (root.contains("geometry")) parse_geometry(root["geometry"], cfg);
  if (root.contains("sample")) {
    check_keys(root["sample"], "sample", {"effective_thickness_xi", "thickness_um"});
    cfg.sample.effective_thickness_xi =
        num(root["sample"], "sample", "effective_thickness_xi", 5.0);
    cfg.sample.thickness_m = num(root["sample"], "sample", "thickness_um", 1.0) * 1e-6;
    if (cfg.sample.effective_thickness_xi <= 0.0)
      fail("sample.effective_thickness_xi", "must be positive");
  }
  if (root.contains("grid")) {
    check_keys(root["grid"], "grid", {"t_start_ns", "t_end_ns", "dt_ns"});
    cfg.grid.t_start = num(root["grid"], "grid", "t_start_ns", 0.0) * 1e-9;
    cfg.grid.t_end = num(root["grid"], "grid", "t_end_ns", 300.0) * 1e-9;
    cfg.grid.dt = num(root["grid"], "grid", "dt_ns", 0.05) * 1e-9;
    try {
      cfg.grid.validate();
    } catch (const std::exception& ex) {
      fail("grid", ex.what());
    }
  }
  if (root.contains("sequence")) parse_sequence(root["sequence"], cfg);
  if (root.contains("solver")) {
    check_keys(root["solver"], "solver", {"max_order", "tol_rel"});
    cfg.max_order = static_cast<int>(num(root["solver"], "solver", "max_order", 8));
    cfg.tol_rel = num(root["solver"], "solver", "tol_rel", 1e-8);
    if (cfg.max_order < 1 || cfg.tol_rel <= 0.0) fail("solver", "invalid settings");
  }
  if (root.contains("windows")) {
    check_keys(root["windows"], "windows", {"sigma_window_ns", "pi_window_ns"});
    WindowSpec w;
    if (!root["windows"].contains("sigma_window_ns") ||
        !root["windows"].contains("pi_window_ns"))
      fail("windows", "both sigma_window_ns and pi_window_ns are required");
    w.sigma_window = window_ns(root["windows"]["sigma_window_ns"],
                               "windows.sigma_window_ns");
    w.pi_window = window_ns(root["windows"]["pi_window_ns"], "windows.pi_window_ns");
    cfg.windows = w;
  }
  if (root.contains("interferometer")) {
    check_keys(root["interferometer"], "interferometer",
               {"phase_sigma_rad", "phase_pi_rad", "splitter_transmittance"});
    const auto& it = root["interferometer"];
    cfg.interferometer.phase_sigma = num(it, "interferometer", "phase_sigma_rad", 0.0);
    cfg.interferometer.phase_pi = num(it, "interferometer", "phase_pi_rad", 0.0);
    cfg.interferometer.splitter_transmittance =
        num(it, "interferometer", "splitter_transmittance", 0.5);
  }
  if (root.contains("bell")) {
    check_keys(root["bell"], "bell",
               {"phi_a_rad", "phi_a_prime_rad", "phi_b_rad", "phi_b_prime_rad",
                "scan_points"});
    const auto& b = root["bell"];
    cfg.bell.a = num(b, "bell", "phi_a_rad", cfg.bell.a);
    cfg.bell.a_prime = num(b, "bell", "phi_a_prime_rad", cfg.bell.a_prime);
    cfg.bell.b = num(b, "bell", "phi_b_rad", cfg.bell.b);
    cfg.bell.b_prime = num(b, "bell", "phi_b_prime_rad", cfg.bell.b_prime);
    cfg.bell_scan_points = static_cast<int>(num(b, "bell", "scan_points", 73));
    if (cfg.bell_scan_points < 2) fail("bell.scan_points", "must be >= 2");
  }
  if (root.contains("scan")) {
    check_keys(root["scan"], "scan", {"configs"});
    if (!root["scan"].contains("configs") || !root["scan"]["configs"].is_array())
      fail("scan.configs", "expected an array of config paths");
    for (const auto& p : root["scan"]["configs"])
      cfg.scan_configs.push_back(p.get<std::string>());
  }
  return cfg;
}

struct Scenario {
  ScenarioConfig cfg;
  LevelScheme scheme;
  SwitchSequence sequence;
  std::optional<FourSwitchPlan> plan;
};

Scenario prepare(const ScenarioConfig& cfg) {
  Scenario sc;
  sc.cfg = cfg;
  sc.scheme = build_level_scheme(cfg.hyperfine);
  if (cfg.design) {
    DesignOptions opts;
    const double t_max = cfg.design->window ? cfg.design->window->second
                                            : cfg.grid.t_end;
    sc.plan = four_switch_plan(cfg.design->final_polarization, sc.scheme,
                               cfg.geometry, cfg.sample, cfg.nuclear, t_max, opts);
    sc.sequence = sc.plan->sequence;
  } else if (cfg.events) {
    sc.sequence = *cfg.events;
  }
  return sc;
}

WindowSpec default_windows(const Scenario& sc) {
  if (sc.cfg.windows) return *sc.cfg.windows;
  if (sc.sequence.events.size() == 4) {
    WindowSpec w;
    w.pi_window = {sc.sequence.events[1].time, sc.sequence.events[2].time};
    w.sigma_window = {sc.sequence.events[3].time, sc.cfg.grid.t_end};
    return w;
  }
  throw ConfigError("config error at windows: required unless the sequence is "
                    "a designed four-switch plan");
}

json sequence_to_json(const SwitchSequence& seq) {
  json events = json::array();
  for (const auto& ev : seq.events)
    events.push_back({{"t_ns", ev.time * 1e9},
                      {"alpha_deg", ev.rotation.alpha / kDeg},
                      {"beta_deg", ev.rotation.beta / kDeg},
                      {"gamma_deg", ev.rotation.gamma / kDeg}});
  return events;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

int run_guarded(const std::string& config_path, const std::string& out_dir,
                int (*body)(const Scenario&, const fs::path&)) {
  try {
    const Scenario sc = prepare(load_scenario(config_path));
    const fs::path out(out_dir);
    fs::create_directories(out);
    return body(sc, out);
  } catch (const ConfigError& ex) {
    std::cerr << ex.what() << "\n";
    return 2;
  } catch (const DesignError& ex) {
    std::cerr << ex.what() << "\n";
    return 3;
  } catch (const ZeroPhotonError& ex) {
    std::cerr << ex.what() << "\n";
    return 4;
  } catch (const std::exception& ex) {
    std::cerr << ex.what() << "\n";
    return 2;
  }
}

FieldRecord simulate(const Scenario& sc) {
  return solve_series(sc.cfg.sample, sc.sequence, sc.scheme, sc.cfg.geometry,
                      sc.cfg.nuclear, sc.cfg.grid, sc.cfg.max_order,
                      sc.cfg.tol_rel);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config error: invalid JSON: ") + ex.what());
  }
  return parse_json(root);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config error: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str());
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  return run_guarded(config_path, out_dir, [](const Scenario& sc, const fs::path& out) {
    const FieldRecord rec = simulate(sc);
    std::ostringstream csv;
    write_intensity_csv(rec, csv);
    write_text(out / "intensity.csv", csv.str());
    json summary{{"truncation_order", rec.truncation_order},
                 {"converged", rec.converged},
                 {"residual_rel", rec.residual_rel},
                 {"samples", rec.grid.samples()},
                 {"sequence", sequence_to_json(sc.sequence)}};
    write_text(out / "summary.json", summary.dump(2) + "\n");
    return 0;
  });
}

int cmd_design(const std::string& config_path, const std::string& out_dir) {
  return run_guarded(config_path, out_dir, [](const Scenario& sc, const fs::path& out) {
    if (!sc.plan)
      throw ConfigError("config error at sequence: 'design' request required");
    json report;
    report["sequence"] = sequence_to_json(sc.plan->sequence);
    json residuals = json::array();
    for (const auto& c : sc.plan->chosen)
      residuals.push_back({{"t_ns", c.time * 1e9},
                           {"residual_rel", c.residual_rel},
                           {"exact", c.exact}});
    report["residual_report"] = residuals;
    write_text(out / "sequence.json", report.dump(2) + "\n");
    return 0;
  });
}

int cmd_entangle(const std::string& config_path, const std::string& out_dir) {
  return run_guarded(config_path, out_dir, [](const Scenario& sc, const fs::path& out) {
    const FieldRecord rec = simulate(sc);
    const WindowSpec windows = default_windows(sc);
    const TwoModeState state = extract_modes(rec, windows, sc.cfg.nuclear);
    const auto bell = bell_scan(state, sc.cfg.bell);
    const auto [p1, p2] = detector_probabilities(state, sc.cfg.interferometer);
    json summary{{"alpha_abs2", std::norm(state.alpha)},
                 {"beta_abs2", std::norm(state.beta)},
                 {"loss_fraction", state.loss_fraction},
                 {"visibility", visibility(state)},
                 {"P_D1", p1},
                 {"P_D2", p2},
                 {"S", bell.S},
                 {"classical_bound", bell.classical_bound}};
    write_text(out / "state.json", summary.dump(2) + "\n");
    std::ostringstream csv;
    write_bell_scan_csv(state, sc.cfg.bell, sc.cfg.bell_scan_points, csv);
    write_text(out / "bell_scan.csv", csv.str());
    return 0;
  });
}

int cmd_scan(const std::string& config_path, const std::string& out_dir) {
  try {
    const ScenarioConfig cfg = load_scenario(config_path);
    if (cfg.scan_configs.empty()) {
      std::cerr << "config error at scan.configs: empty scenario list\n";
      return 2;
    }
    const fs::path base(config_path);
    int worst = 0;
    for (const auto& rel : cfg.scan_configs) {
      fs::path p(rel);
      if (p.is_relative()) p = base.parent_path() / p;
      const fs::path sub = fs::path(out_dir) / p.stem();
      const int rc = cmd_simulate(p.string(), sub.string());
      worst = std::max(worst, rc);
    }
    return worst;
  } catch (const ConfigError& ex) {
    std::cerr << ex.what() << "\n";
    return 2;
  }
}

}  // namespace nfs
