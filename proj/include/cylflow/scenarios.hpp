#pragma once

#include "cylflow/config.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace cylflow {

struct ScenarioResult {
    int exit_code = 0;                 // 0 done, 2 classification inconclusive
    std::vector<std::string> files;
    std::string summary;
};

// Runs cfg.scenario(). Artifacts go to out_dir, or to output.dir, or to out/<scenario>.
// Unknown fields are rejected before any numerical work. Module errors propagate.
// check_only stops after validation; nothing is written.
ScenarioResult run_scenario(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log,
                            bool check_only = false);

// run_scenario with errors mapped to exit codes: 2 for classification-inconclusive, 1 otherwise
int run_scenario_cli(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err,
                     bool check_only = false);

} // namespace cylflow
