#include "horizonlab/app/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "horizonlab/app/csv.hpp"
#include "horizonlab/app/log.hpp"
#include "horizonlab/error.hpp"
#include "horizonlab/horizons.hpp"
#include "tasks.hpp"

namespace horizonlab::app {

using nlohmann::json;
namespace fs = std::filesystem;

TimeProfile make_profile(const json& spec) {
    const std::string kind = spec.at("kind");
    if (kind == "constant") return TimeProfile::constant(spec.at("value"));
    if (kind == "tanh-ramp" || kind == "rational-bump") {
        const double offset = spec.at("offset"), amplitude = spec.at("amplitude");
        const double center = spec.value("center", 0.0), width = spec.value("width", 1.0);
        return kind == "tanh-ramp" ? TimeProfile::tanh_ramp(offset, amplitude, center, width)
                                   : TimeProfile::rational_bump(offset, amplitude, center, width);
    }
    if (kind == "tabulated")
        return TimeProfile::tabulated(spec.at("x0").get<std::vector<double>>(),
                                      spec.at("values").get<std::vector<double>>());
    throw PreconditionError("unknown profile kind " + kind);
}

RadialMetric make_radial_metric(const json& spec) {
    const std::string kind = spec.at("kind");
    if (kind == "acoustic") return acoustic_to_radial(make_profile(spec.at("profile")));
    if (kind == "minkowski") return minkowski_radial();
    if (kind == "radial-bump")
        return radial_bump_metric(spec.at("base"), spec.at("amplitude"), spec.at("center"), spec.at("width"));
    throw PreconditionError("metric kind " + kind + " is not a radial metric");
}

PolarMetric2D make_polar_metric(const json& spec) {
    if (spec.at("kind") != "acoustic-2d") throw PreconditionError("metric is not a 2D polar metric");
    return PolarMetric2D::acoustic(spec.at("A"), spec.at("B"));
}

namespace {

void semantic_checks(const json& doc, std::vector<SchemaError>& errors) {
    const std::string task = doc.at("task");
    const json params = doc.value("params", json::object());
    auto err = [&](const std::string& path, const std::string& msg) { errors.push_back({path, msg}); };
    auto window = [&](double lo_default, double hi_default) {
        const double lo = params.value("x0_min", lo_default), hi = params.value("x0_max", hi_default);
        if (!(lo < hi)) err("/params", "x0_min must be below x0_max");
        return std::pair{lo, hi};
    };

    bool acoustic = false;
    std::optional<TimeProfile> profile;
    if (doc.contains("metric")) {
        const json& m = doc["metric"];
        acoustic = m["kind"] == "acoustic";
        if (acoustic) {
            try {
                profile = make_profile(m["profile"]);
            } catch (const Error& e) {
                err("/metric/profile", e.what());
            }
        }
    }

    if (task == "trajectories") {
        const auto [lo, hi] = window(0, 0);
        const double xs = params.value("x0_start", 0.0);
        if (!(xs >= lo && xs <= hi)) err("/params/x0_start", "x0_start must lie in [x0_min, x0_max]");
    } else if (task == "horizon") {
        window(0, 0);
        const std::string kind = params.value("kind", "outer-black");
        if (params.value("method", "shooting") == "picard") {
            if (!acoustic) err("/params/method", "picard needs an acoustic metric");
            else if (profile && !(profile->sup() < 0.0))
                err("/params/method", "picard needs sup A < 0 (a sink for all times)");
            if (kind != "outer-black") err("/params/kind", "picard constructs the outer black-hole horizon only");
        }
        if (!acoustic && (params.value("dynamic", false) || !params.value("crossings", json::array()).empty()))
            err("/params", "dynamic horizons and crossing times need an acoustic metric");
    } else if (task == "wave-dn") {
        const std::string method = params.value("method", "direct");
        const std::string reference = params.value("reference", "none");
        const int k = params.value("weight_exponent", 0);
        const bool flat = doc["metric"]["kind"] == "minkowski";
        if ((method == "analytic" || reference == "analytic") && !(flat && (k == 0 || k == 2)))
            err("/params", "the analytic trace is known for the minkowski metric with weight_exponent 0 or 2");
        if (reference != "none" && method != "direct")
            err("/params/reference", "a refinement reference applies to the direct method only");
        if (method != "direct" && k != 0)
            err("/params/weight_exponent", "the characteristic trace uses the two-dimensional density (0)");
    } else if (task == "figures") {
        const auto [lo, hi] = window(-10, 10);
        if (!(lo < 0.0 && hi > 0.0)) err("/params", "the figure window must contain x0 = 0");
    }
}

}  // namespace

std::vector<SchemaError> validate_scenario(const json& doc) {
    auto errors = validate_json(doc, scenario_schema());
    if (errors.empty()) semantic_checks(doc, errors);
    return errors;
}

namespace {

json failure_json(const SubtaskRecord& s) {
    json j = {{"subtask", s.name}, {"error_type", s.error_type}, {"message", s.message}};
    if (!s.details.is_null()) j["details"] = s.details;
    return j;
}

}  // namespace

RunResult run_scenario(const json& doc, const RunOptions& options) {
    RunResult result;
    result.errors = validate_scenario(doc);
    if (!result.errors.empty()) {
        result.exit_code = kExitValidation;
        return result;
    }
    const std::string name = doc.at("name");
    const std::string task = doc.at("task");
    result.out_dir = options.out ? *options.out : fs::path(doc.value("output", "runs/" + name));
    const std::uint64_t seed = options.seed ? *options.seed : doc.value("seed", std::uint64_t{0});

    TaskContext ctx{doc, doc.value("params", json::object()), seed, std::max(1u, options.threads),
                    Tolerances::from_json(doc.value("tolerances", json::object()))};
    log(LogLevel::info, "scenario " + name + ": task " + task + ", seed " + std::to_string(seed) + ", " +
                            std::to_string(ctx.threads) + " thread(s)");
    const auto t0 = std::chrono::steady_clock::now();
    TaskOutput out;
    try {
        out = run_task(ctx);
    } catch (const PreconditionError& e) {
        result.exit_code = kExitValidation;
        result.errors.push_back({"", std::string("scenario not applicable: ") + e.what()});
        return result;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log(LogLevel::info, "task finished in " + format_double(std::round(seconds * 1e3) / 1e3) + " s");

    const bool failed = std::any_of(out.subtasks.begin(), out.subtasks.end(), [](const auto& s) { return !s.ok; });
    json subtasks = json::array();
    json failures = json::array();
    for (const auto& s : out.subtasks) {
        subtasks.push_back({{"name", s.name}, {"status", s.ok ? "ok" : "failed"}});
        if (!s.ok) {
            failures.push_back(failure_json(s));
            log(LogLevel::error, "subtask " + s.name + " failed (" + s.error_type + "): " + s.message);
        }
    }
    if (failed) out.artifacts.push_back({"diagnostics.json", json{{"failures", failures}}.dump(2) + "\n"});

    std::vector<std::string> names;
    for (const auto& a : out.artifacts) names.push_back(a.path);
    std::sort(names.begin(), names.end());
    result.summary = {{"name", name},
                      {"task", task},
                      {"status", failed ? "numerical-failure" : "ok"},
                      {"seed", seed},
                      {"scenario", doc},
                      {"subtasks", subtasks},
                      {"results", out.results},
                      {"artifacts", names}};

    for (const auto& a : out.artifacts) {
        write_file_atomic(result.out_dir / a.path, a.content);
        log(LogLevel::debug, "wrote " + (result.out_dir / a.path).string());
    }
    write_file_atomic(result.out_dir / "summary.json", result.summary.dump(2) + "\n");
    result.artifacts = names;
    result.artifacts.push_back("summary.json");
    result.exit_code = failed ? kExitNumerical : kExitOk;
    return result;
}

RunResult run_scenario_file(const fs::path& path, const RunOptions& options) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const std::exception& e) {
        RunResult r;
        r.exit_code = kExitValidation;
        r.errors.push_back({"", "cannot load scenario " + path.string() + ": " + e.what()});
        return r;
    }
    return run_scenario(doc, options);
}

}  // namespace horizonlab::app
