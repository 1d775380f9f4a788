#pragma once

#include <string>
#include <vector>

#include "probe/config.hpp"
#include "probe/detect.hpp"

namespace probe {

struct RunResult {
    int exit_code = 0;              // 0 ok, 2 config error, 3 numerical failure
    std::string message;
    std::vector<std::string> artifacts;
};

/// Builds the potential named by the config (catalog or polynomial file).
Potential potential_from_config(const ExperimentConfig& cfg);

/// Assembles the detector inputs (eigen ladder + test functions) for a config.
DetectInputs detect_inputs_from_config(const ExperimentConfig& cfg, const Potential& pot);

/// Runs one experiment; artifacts land in cfg.out_dir. Partial artifacts are
/// moved to out_dir/quarantine on failure.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Renders SVG plots (and a gnuplot script) from sweep/fit artifacts in dir.
RunResult emit_plots(const std::string& artifact_dir);

}  // namespace probe
