#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavity/driver.hpp"
#include "cavity/errors.hpp"
#include "cavity/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite-element simulator for subglacial cavitation"};
  app.set_version_flag("--version", std::string("cavity ") + cavity::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int jobs = 1;
  for (const char* name : {"steady", "sweep", "unsteady"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--jobs", jobs, "parallel sweep chains")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    cavity::RunManifest manifest = cavity::dispatch(
        subcommand, cavity::parse_config(config_path), out_dir, jobs);
    for (const auto& note : manifest.convergence_notes) std::cout << note << "\n";
    std::cout << "outputs in " << out_dir << " (" << manifest.outputs.size() << " files)\n";
    return 0;
  } catch (const cavity::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const cavity::GeometryError& err) {
    std::cerr << "geometry error: " << err.what() << "\n";
    return 4;
  } catch (const cavity::SolverError& err) {
    std::cerr << "solver error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
