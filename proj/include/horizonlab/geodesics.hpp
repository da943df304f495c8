#pragma once

#include <optional>
#include <string>
#include <vector>

#include "horizonlab/metric.hpp"
#include "horizonlab/ode.hpp"

namespace horizonlab {

enum class Family { plus, minus };
enum class Direction { forward, backward };

/// Terminal state of a characteristic run.  reached_ergosphere only occurs for
/// 2D runs with xi0 = 0, which cannot cross the curve Delta = 0.
enum class Fate { hit_origin, escaped, alive_at_window_end, closed_orbit, reached_ergosphere };

std::string to_string(Family f);
std::string to_string(Direction d);
std::string to_string(Fate f);
inline double sign_of(Direction d) { return d == Direction::forward ? 1.0 : -1.0; }

/// Sampled characteristic curve.  Radial runs fill x0 and r; 2D runs also fill
/// theta, xi_r and xi_theta (xi is kept unit-normalized, which leaves the ray
/// unchanged because H is homogeneous in xi).
struct Trajectory {
    Family family = Family::plus;
    Direction direction = Direction::forward;
    std::vector<double> x0;
    std::vector<double> r;
    std::vector<double> theta;
    std::vector<double> xi_r;
    std::vector<double> xi_theta;
    Fate fate = Fate::alive_at_window_end;
    double x0_end = 0.0;
    double r_end = 0.0;
    /// Linear extrapolation of w = r^2/2 to zero from the r_floor crossing.
    double x0_zero = 0.0;
    /// Largest relative Hamiltonian residual |H| / (|g| |(xi_r, xi_theta/r)|^2) along a 2D run.
    double max_h_drift = 0.0;
    double arc_length = 0.0;
};

struct RadialOptions {
    ode::Options ode{};
    double r_floor = 1e-6;
    /// 0 selects 10 * max(1, metric length scale).
    double r_escape = 0.0;
    /// Escape also needs dr/dx0 >= escape_slope in the direction of travel.
    double escape_slope = 0.25;
    bool record = true;
    /// Optional output times (ordered along the run) sampled from the dense output.
    std::vector<double> sample_times;
};

double default_escape_radius(const RadialMetric& metric);

/// Integrates dr/dx0 = c_family(x0, r) from (x0_start, r0) towards x0_max
/// (forward) or x0_min (backward) until r <= r_floor, escape, or the window
/// end.  Below max(10 r_floor, 1e-3 L), with L the metric length scale, the
/// run continues in w = r^2/2, dw/dx0 = r c, which is regular at the origin.
Trajectory integrate_radial(const RadialMetric& metric, Family family, double r0, double x0_start,
                            Direction direction, double x0_min, double x0_max,
                            const RadialOptions& options = {});

/// Largest per-step defect along a sampled radial curve: each step is
/// re-integrated from its left sample at tolerance 1e-12 and compared with the
/// right sample.  Steps within 10 r_floor of the origin are skipped.
double radial_ode_residual(const RadialMetric& metric, Family family, const std::vector<double>& x0,
                           const std::vector<double>& r);

struct PolarState {
    double x0 = 0.0;
    double r = 1.0;
    double theta = 0.0;
    double xi_r = 0.0;
    double xi_theta = 0.0;
};

/// H(r, theta, xi0 = 0, xi_r, xi_theta).
double hamiltonian(const PolarMetric2D& metric, const PolarState& s);

/// Null covector with xi0 = 0 at (r, theta) for the requested family, signed
/// so that dx0/ds has the sign of `direction`.  The plus family takes
/// xi_r = (-grt + sqrt(-Delta)) / grr * xi_theta / r, the minus family the other
/// root.  Needs Delta(r, theta) < 0 (inside the ergoregion).
PolarState initial_polar_state(const PolarMetric2D& metric, Family family, double x0, double r,
                               double theta, Direction direction);

/// dr/dx0 of the family through (r, theta), from the xi0 = 0 null covector.
double polar_radial_speed(const PolarMetric2D& metric, Family family, double r, double theta);

struct SectionCrossing {
    double x0;
    double r;
    double theta;
    double arc;
};

struct PolarOptions {
    /// Tighter than the radial defaults: the relative Hamiltonian residual
    /// must stay below 1e-7 along runs that approach the 1/r^2 singularity.
    ode::Options ode{.atol = 1e-13, .rtol = 1e-12};
    double r_floor = 1e-6;
    double r_escape = 0.0;  ///< 0 selects 10 * max(1, |b1|, |b2|) sampled on a theta grid
    /// Stop when Delta >= -ergosphere_margin.
    double ergosphere_margin = 1e-9;
    /// Abort when the relative Hamiltonian residual exceeds this.
    double h_drift_tolerance = 1e-7;
    bool record = true;
    /// Optional Poincare section: crossings of the ray theta = section_theta
    /// in the direction of increasing theta (sin(theta - section) rising while
    /// cos(theta - section) > 0).
    std::optional<double> section_theta;
    /// Stop after this many section crossings (0: unlimited).
    std::size_t max_crossings = 0;
};

struct PolarRun {
    Trajectory trajectory;
    std::vector<SectionCrossing> crossings;
};

/// Integrates the xi0 = 0 bicharacteristic system in a rescaled curve
/// parameter (unit speed in (x0, r, r theta)) for up to max_arc.
PolarRun integrate_polar2d(const PolarMetric2D& metric, const PolarState& init, Family family,
                           Direction direction, double max_arc, const PolarOptions& options = {});

struct CensusEntry {
    double r0;
    Fate fate;
    double x0_end;
};

struct CensusTable {
    Family family;
    Direction direction;
    double x0_start;
    std::vector<CensusEntry> entries;
    /// Index of the last hit_origin entry and first escaped entry (or -1).
    int last_hit = -1;
    int first_escape = -1;
};

/// Fates for every r0 of a sorted grid.  Fates must be ordered by r0
/// (hit_origin, then alive, then escaped); otherwise ResolutionError.
CensusTable fate_census(const RadialMetric& metric, Family family, const std::vector<double>& r0_grid,
                        double x0_start, Direction direction, double x0_min, double x0_max,
                        const RadialOptions& options = {}, unsigned threads = 1);

}  // namespace horizonlab
