#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/report.hpp"
#include "cli/scenario.hpp"
#include "qoptics/errors.hpp"

using namespace qoptics;

namespace {

// Exit codes: 0 success, 1 engine failure, 2 invalid input or usage.
constexpr int kEngineFailure = 1;
constexpr int kInvalidInput = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fock-space linear optics, polarization imaging and virtual-state coupling calculations"};
    app.require_subcommand(1);

    std::string scenario_path, format = "table", out_path, sweep;
    for (const char* name : {"twc", "afshar", "cqed", "custom"}) {
        auto* sub = app.add_subcommand(name, "run a scenario of kind " + cli::kind_for_command(name));
        sub->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
        sub->add_option("--format", format, "table, json or csv")->check(CLI::IsMember({"table", "json", "csv"}));
        sub->add_option("--out", out_path, "write the output to this file instead of stdout");
        sub->add_option("--sweep", sweep, "vary one parameter: key=start:stop:count");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kInvalidInput;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const auto doc = cli::load_scenario_document(scenario_path);
        const auto fmt = cli::parse_format(format);
        const cli::RunReport report =
            sweep.empty() ? cli::run_scenario(command, doc) : cli::run_sweep(command, doc, cli::parse_sweep(sweep));
        const std::string text = cli::render(report, fmt);
        if (out_path.empty()) std::cout << text << std::flush;
        else cli::write_file_atomically(out_path, text);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const RegistryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEngineFailure;
    }
    return 0;
}
