#pragma once

#include <string>
#include <vector>

#include "cavity/config.hpp"

namespace cavity {

/// Record of one CLI run: what was configured, what was written, how it went.
struct RunManifest {
  std::string subcommand;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;             ///< files written, relative to out_dir
  std::vector<std::string> convergence_notes;   ///< one line per driver stage
};

/// Run one of the experiment drivers and write its CSV outputs plus
/// manifest.json under out_dir. Partial outputs of a failed run are kept
/// with a .partial suffix before the error propagates. `jobs` parallelizes
/// independent sweep chains only.
RunManifest dispatch(const std::string& subcommand, const ParsedConfig& config,
                     const std::string& out_dir, int jobs = 1);

}  // namespace cavity
