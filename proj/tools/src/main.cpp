#include <iostream>

#include "CLI11.hpp"
#include "qprep_cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qprep: Grover-based quantum state preparation simulator"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string report;
    std::string vary;

    auto* plan = app.add_subcommand("plan", "Print the iteration schedule for a config");
    plan->add_option("config", config, "Instance config (JSON)")->required();

    auto* run = app.add_subcommand("run", "Prepare the state and check every bound");
    run->add_option("config", config, "Instance config (JSON)")->required();
    run->add_option("--out", out, "Output directory for report.json and amplitudes.csv")
        ->required();

    auto* verify = app.add_subcommand("verify", "Re-evaluate the checks in a report.json");
    verify->add_option("report", report, "Path to report.json")->required();

    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write a CSV summary");
    sweep->add_option("config", config, "Base instance config (JSON)")->required();
    sweep->add_option("--vary", vary, "a=LO..HI or tprime=LO..HI")->required();
    sweep->add_option("--out", out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qprep::cli::kExitValidation;
    }

    if (*plan) return qprep::cli::cmd_plan(config, std::cout, std::cerr);
    if (*run) return qprep::cli::cmd_run(config, out, std::cout, std::cerr);
    if (*verify) return qprep::cli::cmd_verify(report, std::cout, std::cerr);
    return qprep::cli::cmd_sweep(config, vary, out, std::cout, std::cerr);
}
