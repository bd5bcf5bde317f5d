#include <CLI11.hpp>

#include "nfs/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nuclear forward scattering with hyperfine-field switching"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  int (*driver)(const std::string&, const std::string&) = nullptr;

  const std::pair<const char*, int (*)(const std::string&, const std::string&)>
      cmds[] = {{"simulate", &nfs::cmd_simulate},
                {"design", &nfs::cmd_design},
                {"scan", &nfs::cmd_scan},
                {"entangle", &nfs::cmd_entangle}};
  for (const auto& [name, fn] : cmds) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "scenario config (JSON)")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->callback([&driver, fn] { driver = fn; });
  }

  CLI11_PARSE(app, argc, argv);
  return driver(config_path, out_dir);
}
