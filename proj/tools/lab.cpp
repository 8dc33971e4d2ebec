// lab <scenario> --config FILE [--seed N] [--out DIR] [--check]
// lab verify [--only NAME]

#include "cylflow/acceptance.hpp"
#include "cylflow/config.hpp"
#include "cylflow/error.hpp"
#include "cylflow/scenarios.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

int main(int argc, char** argv)
{
    CLI::App app{"cylindrical singularity lab"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<unsigned long long> seed;
    bool check = false;
    for (const auto& name : cylflow::scenario_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " scenario");
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--check", check, "validate the config and exit");
    }
    std::vector<std::string> only;
    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    verify->add_option("--only", only, "criterion, number or group (repeatable)")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    if (verify->parsed()) return cylflow::run_acceptance(only, std::cout) == 0 ? 0 : 1;

    const std::string scenario = app.get_subcommands().front()->get_name();
    try {
        cylflow::ExperimentConfig cfg = cylflow::ExperimentConfig::load(config_path);
        if (cfg.scenario() != scenario)
            cfg.field_error("scenario", "config is for '" + cfg.scenario() + "', not '" + scenario + "'");
        if (seed) cfg.set_seed(*seed);
        return cylflow::run_scenario_cli(cfg, out_dir, std::cout, std::cerr, check);
    } catch (const cylflow::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
