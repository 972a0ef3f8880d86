#include <iostream>

#include "CLI11.hpp"

#include "qphase/experiment.hpp"

namespace {

int execute(bool compare_mode, const std::string& config_path, const std::string& out_dir,
            bool quiet)
{
    try {
        const auto config = qphase::cli::load_config(config_path);
        const auto summary = compare_mode ? qphase::cli::compare(config, out_dir)
                                          : qphase::cli::run(config, out_dir);
        if (!quiet) {
            for (const auto& path : summary.outputs)
                std::cout << "wrote " << path.string() << '\n';
            std::cout << summary.metrics.dump(2) << '\n';
        }
        return 0;
    }
    catch (const qphase::cli::ConfigError& e) {
        for (const auto& p : e.problems())
            std::cerr << "cli: " << p << '\n';
        return 1;
    }
    catch (const qphase::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    catch (const qphase::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e) {
        std::cerr << "cli: " << e.what() << '\n';
        return 2;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dressed-state phases, pulse-pair interferometry and hydrodynamic diagnostics "
                 "for driven two-level systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool quiet = false;

    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON config");
    auto* compare_cmd =
        app.add_subcommand("compare", "Compare dressed amplitudes with the RWA integrator");
    for (auto* cmd : {run_cmd, compare_cmd}) {
        cmd->add_option("--config", config_path, "Experiment description (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", out_dir, "Output directory")->required();
        cmd->add_flag("--quiet", quiet, "Suppress console output");
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return execute(compare_cmd->parsed(), config_path, out_dir, quiet);
}
