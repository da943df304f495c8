// Batch front end: run a scenario, compare two runs, print the scenario schema.

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "horizonlab/app/compare.hpp"
#include "horizonlab/app/csv.hpp"
#include "horizonlab/app/log.hpp"
#include "horizonlab/app/scenario.hpp"
#include "horizonlab/app/schema.hpp"

namespace app = horizonlab::app;

namespace {

void print_errors(const std::vector<app::SchemaError>& errors) {
    std::cerr << "scenario rejected (" << errors.size() << " error" << (errors.size() == 1 ? "" : "s") << "):\n";
    for (const auto& e : errors) std::cerr << "  " << (e.path.empty() ? "/" : e.path) << ": " << e.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"horizonlab: analogue horizon laboratory (batch front end)"};
    cli.require_subcommand(1);

    std::string scenario;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    auto* run = cli.add_subcommand("run", "Run a scenario and write its artifacts");
    run->add_option("--scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory (overrides the scenario)");
    run->add_option("--seed", seed, "Seed (overrides the scenario)");
    run->add_option("--threads", threads, "Worker threads for independent sub-runs")->check(CLI::Range(1u, 1024u));

    std::string dir_a, dir_b, report_path;
    double tolerance = 0.0;
    std::vector<double> range;
    std::vector<std::string> columns;
    auto* compare = cli.add_subcommand("compare", "Field-wise numeric diff of two run directories");
    compare->add_option("run_a", dir_a, "First run directory")->required()->check(CLI::ExistingDirectory);
    compare->add_option("run_b", dir_b, "Second run directory")->required()->check(CLI::ExistingDirectory);
    compare->add_option("--tolerance", tolerance, "Largest accepted max-abs difference")->check(CLI::NonNegativeNumber);
    compare->add_option("--range", range, "Keep rows whose first column lies in [lo, hi]")->expected(2);
    compare->add_option("--columns", columns, "Compare only these CSV columns");
    compare->add_option("--report", report_path, "Also write the report JSON to this file");

    cli.add_subcommand("schema", "Print the scenario JSON schema");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : app::kExitValidation;
    }

    try {
        if (cli.got_subcommand("schema")) {
            std::cout << app::scenario_schema_text();
            return app::kExitOk;
        }
        if (cli.got_subcommand("run")) {
            app::RunOptions opts;
            if (out) opts.out = *out;
            opts.seed = seed;
            opts.threads = threads;
            const auto res = app::run_scenario_file(scenario, opts);
            if (res.exit_code == app::kExitValidation) {
                print_errors(res.errors);
                return res.exit_code;
            }
            std::cout << res.summary.value("status", "") << ": " << res.artifacts.size() << " files in "
                      << res.out_dir.string() << '\n';
            return res.exit_code;
        }
        app::CompareOptions co;
        co.tolerance = tolerance;
        if (range.size() == 2) co.range = std::pair{range[0], range[1]};
        co.columns = columns;
        const auto rep = app::compare_runs(dir_a, dir_b, co);
        const std::string text = rep.to_json().dump(2) + "\n";
        std::cout << text;
        if (!report_path.empty()) app::write_file_atomic(report_path, text);
        return rep.within_tolerance() ? app::kExitOk : app::kExitDiffExceeded;
    } catch (const app::IncompatibleRuns& e) {
        std::cerr << "compare: " << e.what() << '\n';
        return app::kExitValidation;
    } catch (const std::exception& e) {
        app::log(app::LogLevel::error, e.what());
        return app::kExitNumerical;
    }
}
