#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "horizonlab/app/scenario.hpp"
#include "horizonlab/geodesics.hpp"
#include "horizonlab/horizons.hpp"
#include "json.hpp"

namespace horizonlab::app {

/// Tolerance overrides; unset fields keep the operation defaults.
struct Tolerances {
    std::optional<double> atol, rtol, bisection, picard;

    static Tolerances from_json(const nlohmann::json& j);
    void apply(ode::Options& o) const;
    RadialOptions radial() const;
    ShootOptions shoot(unsigned threads) const;
};

struct TaskContext {
    const nlohmann::json& doc;
    nlohmann::json params;
    std::uint64_t seed;
    unsigned threads;
    Tolerances tol;
};

struct SubtaskRecord {
    std::string name;
    bool ok = true;
    std::string error_type;
    std::string message;
    nlohmann::json details;
};

struct TaskOutput {
    std::vector<Artifact> artifacts;
    nlohmann::json results = nlohmann::json::object();
    std::vector<SubtaskRecord> subtasks;
};

/// Runs the scenario's task in memory.  Numerical failures are recorded per
/// subtask; PreconditionError propagates (the scenario does not apply).
TaskOutput run_task(const TaskContext& ctx);

}  // namespace horizonlab::app
