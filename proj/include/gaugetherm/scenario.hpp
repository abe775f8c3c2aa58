// Declarative scenario front-end: parse a JSON config, run simulations,
// gauge studies, machine cycles and parameter sweeps; emit CSV time series
// and a JSON summary. Strict schema: unknown keys are rejected.

#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "gaugetherm/models.hpp"

namespace gaugetherm {

struct RunOptions {
    int jobs = 1;          // sweep-point concurrency
    std::ostream* log = nullptr;  // progress notes; null silences them
};

struct RunArtifacts {
    std::vector<std::filesystem::path> csv_files;
    std::filesystem::path summary_file;
    nlohmann::json summary;
};

nlohmann::json load_config_file(const std::filesystem::path& path);

// Full structural validation; throws SchemaError with a config path.
void validate_config(const nlohmann::json& config);

RunArtifacts run_scenario(const nlohmann::json& config, const RunOptions& options = {});

// Requires a sweep block; one summary row per parameter value, order-stable.
RunArtifacts run_sweep(const nlohmann::json& config, const RunOptions& options = {});

// 17-significant-digit, locale-independent float formatting used for CSVs.
std::string format_double(double value);

}  // namespace gaugetherm
