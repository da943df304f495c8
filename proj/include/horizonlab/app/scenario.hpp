#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "horizonlab/app/schema.hpp"
#include "horizonlab/metric.hpp"
#include "json.hpp"

namespace horizonlab::app {

/// Process exit codes of the CLI.
enum ExitCode : int { kExitOk = 0, kExitDiffExceeded = 1, kExitValidation = 2, kExitNumerical = 3 };

/// Schema violations followed by semantic checks the schema cannot express
/// (window order, table monotonicity, method applicability).  Semantic checks
/// run only on a schema-clean document; the list is exhaustive within each stage.
std::vector<SchemaError> validate_scenario(const nlohmann::json& doc);

/// Builders for validated metric specs.
TimeProfile make_profile(const nlohmann::json& spec);
RadialMetric make_radial_metric(const nlohmann::json& spec);
PolarMetric2D make_polar_metric(const nlohmann::json& spec);

struct RunOptions {
    std::optional<std::filesystem::path> out;  ///< overrides the scenario's output
    std::optional<std::uint64_t> seed;         ///< overrides the scenario's seed
    unsigned threads = 1;
};

/// A file produced by a task, relative to the output directory.
struct Artifact {
    std::string path;
    std::string content;
};

struct RunResult {
    int exit_code = kExitOk;
    std::filesystem::path out_dir;
    std::vector<SchemaError> errors;     ///< validation or precondition errors (exit 2)
    nlohmann::json summary;              ///< empty on exit 2
    std::vector<std::string> artifacts;  ///< files written, relative to out_dir
};

/// Validates, runs the task fully in memory and commits each artifact
/// atomically.  On exit 2 nothing is written; on exit 3 the artifacts of the
/// subtasks that succeeded are written with summary.json and diagnostics.json.
RunResult run_scenario(const nlohmann::json& doc, const RunOptions& options);

/// Reads and parses `path`; a read or parse failure is a validation error.
RunResult run_scenario_file(const std::filesystem::path& path, const RunOptions& options);

}  // namespace horizonlab::app
