// gaugetherm: simulate time-local master equations and their gauge-resolved
// thermodynamics from declarative JSON scenarios.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaugetherm/errors.hpp"
#include "gaugetherm/scenario.hpp"

namespace {

int jobs_from_env() {
    if (const char* env = std::getenv("GAUGETHERM_JOBS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            return 1;
        }
    }
    return 1;
}

void emit_error(int code, const std::string& kind, const std::string& message,
                const std::string& path = {}) {
    nlohmann::json err{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
    if (!path.empty()) err["error"]["path"] = path;
    std::cerr << err.dump() << "\n";
}

int dispatch(const std::string& command, const std::string& config_path,
             const gaugetherm::RunOptions& options) {
    using namespace gaugetherm;
    try {
        const nlohmann::json config = load_config_file(config_path);
        if (command == "validate") {
            validate_config(config);
            if (options.log) *options.log << "config ok\n";
            return 0;
        }
        const RunArtifacts artifacts =
            command == "sweep" ? run_sweep(config, options) : run_scenario(config, options);
        if (options.log) {
            *options.log << "summary: " << artifacts.summary_file.string() << "\n";
        }
        return 0;
    } catch (const SchemaError& e) {
        emit_error(1, "schema", e.what(), e.path());
        return 1;
    } catch (const NumericalError& e) {
        emit_error(2, "numerical", e.what());
        return 2;
    } catch (const CrossCheckError& e) {
        emit_error(3, "crosscheck", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        emit_error(1, "schema", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error(2, "numerical", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gauge-resolved thermodynamics of time-local master equations"};
    app.require_subcommand(1);
    app.fallthrough();  // accept --jobs/--quiet after the subcommand too

    int jobs = jobs_from_env();
    bool quiet = false;
    app.add_option("--jobs", jobs, "Concurrent sweep points (env GAUGETHERM_JOBS)");
    app.add_flag("--quiet", quiet, "Suppress progress output");

    std::string config_path;
    CLI::App* simulate = app.add_subcommand("simulate", "Run a scenario config");
    simulate->add_option("config", config_path, "JSON scenario file")->required();
    CLI::App* sweep = app.add_subcommand("sweep", "Run the sweep block of a config");
    sweep->add_option("config", config_path, "JSON scenario file")->required();
    CLI::App* validate = app.add_subcommand("validate", "Validate a config and exit");
    validate->add_option("config", config_path, "JSON scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    gaugetherm::RunOptions options;
    options.jobs = jobs;
    options.log = quiet ? nullptr : &std::cerr;

    const std::string command = app.get_subcommands().front()->get_name();
    return dispatch(command, config_path, options);
}
