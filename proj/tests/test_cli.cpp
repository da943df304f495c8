#include "doctest.h"
#include "horizonlab/app/compare.hpp"
#include "horizonlab/app/csv.hpp"
#include "horizonlab/app/log.hpp"
#include "horizonlab/app/scenario.hpp"
#include "horizonlab/app/schema.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

using namespace horizonlab::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(HORIZONLAB_SOURCE_DIR) / "scenarios";

/// Fresh directory under the build tree, removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::current_path() / ("cli_test_" + name)) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

json load(const fs::path& p) { return json::parse(read_file(p)); }

std::set<std::string> messages(const std::vector<SchemaError>& errors) {
    std::set<std::string> s;
    for (const auto& e : errors) s.insert(e.path + ": " + e.message);
    return s;
}

bool has_path(const std::vector<SchemaError>& errors, const std::string& path) {
    return std::any_of(errors.begin(), errors.end(), [&](const auto& e) { return e.path == path; });
}

}  // namespace

TEST_CASE("doubles print with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(format_double(2.0 / 3.0) == "0.66666666666666663");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(format_double(NAN) == "nan");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("CSV quoting follows RFC 4180 and round-trips") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");

    CsvTable t({"name", "value", "count"});
    t.add_row({std::string("a,b"), 0.5, 3LL});
    t.add_row({std::string("q\"uote\r\nx"), -1.0, -7LL});
    const std::string text = t.str();
    CHECK(text.substr(0, 18) == "name,value,count\r\n");
    const CsvData d = parse_csv(text);
    REQUIRE(d.rows.size() == 2);
    CHECK(d.header == std::vector<std::string>{"name", "value", "count"});
    CHECK(d.rows[0] == std::vector<std::string>{"a,b", "0.5", "3"});
    CHECK(d.rows[1] == std::vector<std::string>{"q\"uote\r\nx", "-1", "-7"});
    CHECK_THROWS(t.add_row({1.0}));
    CHECK_THROWS(parse_csv("a,\"b\nc"));
}

TEST_CASE("atomic writes leave no temporary files") {
    TempDir dir("atomic");
    const fs::path p = dir.path / "sub" / "file.csv";
    write_file_atomic(p, "first");
    write_file_atomic(p, "second");
    CHECK(read_file(p) == "second");
    std::size_t n = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir.path)) n += e.is_regular_file();
    CHECK(n == 1);
}

TEST_CASE("validator reports every violation") {
    const json schema = json::parse(R"({
        "type": "object", "required": ["a", "b"], "additionalProperties": false,
        "properties": {
            "a": {"type": "integer", "minimum": 0},
            "b": {"type": "array", "minItems": 2, "uniqueItems": true, "items": {"type": "number", "exclusiveMaximum": 1}},
            "c": {"enum": ["x", "y"]}
        }
    })");
    const auto errors = validate_json(json::parse(R"({"a": 1.5, "b": [2, 2], "c": "z", "d": 0})"), schema);
    const auto m = messages(errors);
    CHECK(m.size() == 6);
    CHECK(has_path(errors, "/a"));
    CHECK(has_path(errors, "/b/0"));
    CHECK(has_path(errors, "/b/1"));
    CHECK(has_path(errors, "/c"));
    CHECK(has_path(errors, "/d"));
    CHECK(validate_json(json::parse(R"({"a": 2.0, "b": [0, 0.5]})"), schema).empty());
    CHECK_THROWS_AS(validate_json(json(1), json::parse(R"({"pattern": "x"})")), std::logic_error);
}

TEST_CASE("schema accepts every shipped scenario and rejects a removed required field") {
    CHECK(!scenario_schema_text().empty());
    CHECK(scenario_schema().at("$defs").contains("metric"));
    int n = 0;
    for (const auto& e : fs::directory_iterator(kScenarios)) {
        if (e.path().extension() != ".json") continue;
        ++n;
        const json doc = load(e.path());
        const auto errors = validate_scenario(doc);
        INFO(e.path().filename().string());
        CHECK(errors.empty());
        for (const char* key : {"name", "task"}) {
            json cut = doc;
            cut.erase(key);
            CHECK(has_path(validate_json(cut, scenario_schema()), ""));
        }
        if (doc.contains("params") && doc["task"] != "figures" && doc["task"] != "stationary2d") {
            json cut = doc;
            cut.erase("params");
            CHECK_FALSE(validate_json(cut, scenario_schema()).empty());
        }
    }
    CHECK(n >= 10);
}

TEST_CASE("malformed scenario exits 2 without artifacts") {
    TempDir dir("malformed");
    json doc = load(kScenarios / "horizon_tanh_shooting.json");
    doc["params"].erase("x0_max");
    doc["params"]["n_samples"] = 1;
    doc["metric"]["profile"]["width"] = -1.0;
    doc["surplus"] = true;
    RunOptions o;
    o.out = dir.path;
    const auto r = run_scenario(doc, o);
    CHECK(r.exit_code == kExitValidation);
    CHECK(r.errors.size() == 4);
    CHECK_FALSE(fs::exists(dir.path));

    // Preconditions the library finds at run time are validation errors too.
    json erg = load(kScenarios / "stationary2d_source.json");
    erg["metric"]["A"] = 0.0;
    erg["metric"]["B"] = 0.0;
    const auto r2 = run_scenario(erg, o);
    CHECK(r2.exit_code == kExitValidation);
    CHECK_FALSE(fs::exists(dir.path));
}

TEST_CASE("numerical failure exits 3 with diagnostics") {
    TempDir dir("numerical");
    const json doc = json::parse(R"({
        "name": "short_window", "task": "horizon",
        "metric": {"kind": "acoustic", "profile": {"kind": "tanh-ramp", "offset": 0, "amplitude": -1}},
        "params": {"x0_min": -0.1, "x0_max": 10, "n_samples": 51, "crossings": ["appearance"]}
    })");
    RunOptions o;
    o.out = dir.path;
    const auto r = run_scenario(doc, o);
    CHECK(r.exit_code == kExitNumerical);
    const json diag = load(dir.path / "diagnostics.json");
    REQUIRE(diag["failures"].size() == 1);
    CHECK(diag["failures"][0]["error_type"] == "WindowTooShortError");
    const json summary = load(dir.path / "summary.json");
    CHECK(summary["status"] == "numerical-failure");
    CHECK(summary["subtasks"][0]["status"] == "ok");
    CHECK(summary["subtasks"][1]["status"] == "failed");
}

TEST_CASE("runs are byte-identical across thread counts") {
    TempDir dir("determinism");
    for (const char* name : {"figures", "stationary2d_sink", "classify_ramp"}) {
        const json doc = load(kScenarios / (std::string(name) + ".json"));
        RunOptions a, b;
        a.out = dir.path / name / "a";
        b.out = dir.path / name / "b";
        b.threads = 4;
        REQUIRE(run_scenario(doc, a).exit_code == kExitOk);
        const auto rb = run_scenario(doc, b);
        REQUIRE(rb.exit_code == kExitOk);
        for (const auto& f : rb.artifacts) {
            INFO(name << "/" << f);
            CHECK(read_file(*a.out / f) == read_file(*b.out / f));
        }
        const auto rep = compare_runs(*a.out, *b.out);
        CHECK(rep.within_tolerance());
        CHECK(rep.max_abs == 0.0);
    }
}

TEST_CASE("seed override changes sampled outputs only") {
    TempDir dir("seed");
    const json doc = load(kScenarios / "classify_ramp.json");
    RunOptions a, b;
    a.out = dir.path / "a";
    b.out = dir.path / "b";
    b.seed = 43;
    REQUIRE(run_scenario(doc, a).exit_code == kExitOk);
    REQUIRE(run_scenario(doc, b).exit_code == kExitOk);
    CHECK(read_file(*a.out / "classify.csv") == read_file(*b.out / "classify.csv"));
    CHECK(read_file(*a.out / "cone.csv") != read_file(*b.out / "cone.csv"));
    CHECK(load(*b.out / "summary.json")["seed"] == 43);
}

TEST_CASE("compare: cross-method horizons and incompatible runs") {
    TempDir dir("compare");
    RunOptions o;
    o.out = dir.path / "shoot";
    REQUIRE(run_scenario(load(kScenarios / "horizon_tanh_shooting.json"), o).exit_code == kExitOk);
    o.out = dir.path / "picard";
    REQUIRE(run_scenario(load(kScenarios / "horizon_tanh_picard.json"), o).exit_code == kExitOk);
    o.out = dir.path / "traj";
    REQUIRE(run_scenario(load(kScenarios / "trajectories_black.json"), o).exit_code == kExitOk);

    CompareOptions co;
    co.tolerance = 1e-5;
    co.range = std::pair{0.0, 50.0};
    const auto rep = compare_runs(dir.path / "shoot", dir.path / "picard", co);
    CHECK(rep.within_tolerance());
    CHECK(rep.max_abs <= 1e-5);
    CHECK(rep.unmatched.size() == 1);  // dynamic.csv
    const auto self = compare_runs(dir.path / "shoot", dir.path / "shoot");
    CHECK(self.max_abs == 0.0);
    for (const auto& r : self.results) CHECK(r.max_abs == 0.0);
    CHECK_THROWS_AS(compare_runs(dir.path / "shoot", dir.path / "traj"), IncompatibleRuns);
}

TEST_CASE("figures task writes the four panels") {
    TempDir dir("figures");
    RunOptions o;
    o.out = dir.path;
    const auto r = run_scenario(load(kScenarios / "figures.json"), o);
    REQUIRE(r.exit_code == kExitOk);
    for (const char* panel : {"fig1a", "fig1b", "fig2a", "fig2b"}) {
        CHECK(fs::exists(dir.path / panel / "trajectories.csv"));
        CHECK(fs::exists(dir.path / panel / "fates.csv"));
    }
    const json res = r.summary["results"];
    // Inside r = |A| plus curves of the sink fall in; minus curves always do.
    CHECK(res["fig1a"]["fates_forward"]["hit_origin"] == 3);
    CHECK(res["fig1b"]["fates_forward"]["hit_origin"] == 6);
    CHECK(res["fig2a"]["fates_backward"]["hit_origin"] == 6);
    CHECK(res["fig2b"]["fates_backward"]["hit_origin"] == 3);
    CHECK(res["fig1a"]["separatrix"]["max_deviation_from_abs_A"].get<double>() < 1e-6);
    CHECK(res["fig2b"]["separatrix"]["max_deviation_from_abs_A"].get<double>() < 1e-6);
}
