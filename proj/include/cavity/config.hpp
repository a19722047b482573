#pragma once

#include <string>
#include <vector>

#include "cavity/scenarios.hpp"

namespace cavity {

/// Scenario configuration plus the experiment-specific extras parsed from a
/// sectioned key = value file.
struct ParsedConfig {
  ScenarioConfig scenario;

  // [sweep]
  std::vector<double> sweep_N;        ///< effective pressures, visited in order
  std::vector<double> sweep_n;        ///< Glen exponents (one chain each)

  // [unsteady]
  double unsteady_N0 = 0.0;
  bool has_unsteady_N0 = false;
  double unsteady_amplitude = 0.1;
  double unsteady_frequency = 0.4;
  double unsteady_t_end = 7.5;

  // [output]
  int cadence = 1;
  bool snapshots = false;
  bool solver_log = false;
  bool mesh_dump = false;
};

/// Parse and validate a config file. Unknown sections or keys, missing
/// required keys and malformed values raise ConfigError naming the line.
///
/// Sections: [bed] r; [rheology] n A delta_reg; [mesh] n_e n_layers H grading;
/// [bc] mode u_i tau_b N; [time] dt t_end steady_threshold; [solver] c
/// newton_tol max_iter continuation; [output] cadence snapshots solver_log mesh_dump;
/// [sweep] N_values n_values; [unsteady] N0 amplitude frequency t_end.
ParsedConfig parse_config(const std::string& path);

}  // namespace cavity
