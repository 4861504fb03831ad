// pfr - periodic optimal control of a plug flow reactor model.
//
// Subcommands:
//   pfr run <config> [--check] [--out DIR]   execute a scenario file
//   pfr validate <config>                    parse and validate only
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible specification,
// 4 failed --check assertion.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pfr/config.hpp"
#include "pfr/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"periodic optimal control of a plug flow reactor model"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool check = false;

    auto* run = app.add_subcommand("run", "execute a scenario file");
    run->add_option("config", config_path, "scenario file")->required();
    run->add_flag("--check", check, "verify the run's acceptance assertions");
    run->add_option("--out", out_dir, "directory for output artifacts");

    auto* validate = app.add_subcommand("validate", "parse and validate a scenario file");
    validate->add_option("config", config_path, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const pfr::ScenarioConfig config = pfr::load_config(config_path);
        if (validate->parsed()) {
            pfr::validate_scenario(config);
            std::cout << "ok\n";
            return 0;
        }
        return pfr::run_scenario(config, pfr::RunOptions{check, out_dir});
    } catch (const pfr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const pfr::InfeasibleSpecError& e) {
        std::cerr << "infeasible spec: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
