#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace horizonlab::app {

struct CompareOptions {
    double tolerance = 0.0;
    /// Keep only rows whose first column lies in [lo, hi] in both runs.
    std::optional<std::pair<double, double>> range;
    /// Restrict the CSV comparison to these columns (all shared numeric columns when empty).
    std::vector<std::string> columns;
};

struct ColumnDiff {
    std::string file;
    std::string column;
    std::size_t count = 0;
    double max_abs = 0.0;
    double rms = 0.0;
    std::size_t text_mismatches = 0;  ///< non-numeric cells that differ
};

struct CompareReport {
    std::string task;
    std::vector<ColumnDiff> columns;
    std::vector<ColumnDiff> results;    ///< numeric leaves of summary "results"
    std::vector<std::string> problems;   ///< structural mismatches of shared files (headers, row counts, text)
    std::vector<std::string> unmatched;  ///< CSV artifacts present in one run only (informational)
    double max_abs = 0.0;               ///< over CSV columns
    double tolerance = 0.0;
    bool within_tolerance() const { return problems.empty() && max_abs <= tolerance; }
    nlohmann::json to_json() const;
};

/// Thrown when the two runs cannot be compared (missing summary, different task).
class IncompatibleRuns : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Field-wise numeric diff of two run directories: every CSV artifact listed
/// in both summaries is matched row by row and column by column.
CompareReport compare_runs(const std::filesystem::path& a, const std::filesystem::path& b,
                           const CompareOptions& options = {});

}  // namespace horizonlab::app
