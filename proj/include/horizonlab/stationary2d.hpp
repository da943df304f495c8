#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "horizonlab/geodesics.hpp"
#include "horizonlab/metric.hpp"

namespace horizonlab {

/// Sampled ergosphere r_e(theta), the first root of Delta along each ray.
struct Ergosphere {
    std::vector<double> theta;
    std::vector<double> r;
    /// max |Delta(r_e(theta), theta)| over the grid.
    double max_root_residual = 0.0;
    /// Samples where the curve is characteristic: the spatial normal is null
    /// up to a relative 1e-8.
    std::vector<double> characteristic_theta;
    bool non_characteristic() const { return characteristic_theta.empty(); }
};

struct ErgosphereOptions {
    double r_min = 1e-3;
    double r_max = 0.0;  ///< 0 selects 1e3 * max(1, |b1|, |b2|)
    int n_scan = 400;
    double root_tol = 1e-10;
};

/// Theta grid [0, 2 pi) with n points.
std::vector<double> uniform_theta_grid(int n);

/// Needs Delta < 0 near the origin and a sign change on every ray; otherwise
/// PartialErgosphereError.
Ergosphere locate_ergosphere(const PolarMetric2D& metric, const std::vector<double>& theta_grid,
                             const ErgosphereOptions& options = {});

enum class OrbitKind { black_horizon, white_horizon };
std::string to_string(OrbitKind kind);

struct ClosedOrbit {
    Family family = Family::plus;
    OrbitKind kind = OrbitKind::black_horizon;
    /// x0 elapsed over one revolution; infinite for a degenerate circle of
    /// fixed points (purely radial flow).
    double period = 0.0;
    bool degenerate = false;
    /// One revolution starting on the section.
    std::vector<double> x0, r, theta;
    double section_r = 0.0;
    double closure_defect = 0.0;
    /// d r_{k+1} / d r_k of the return map in the attracting direction; for a
    /// degenerate circle, d(dr/dx0)/dr of the radial flow on it.
    double return_map_derivative = 0.0;
    Direction attracting = Direction::backward;
    int votes_black = 0;
    int votes_white = 0;
    double min_r() const;
    double max_r() const;
};

struct OrbitSearchOptions {
    PolarOptions polar{};
    double section_theta = 0.0;
    double epsilon = 0.0;           ///< inner edge of the seed annulus; 0 selects 0.05 min r_e
    std::size_t max_returns = 60;  ///< section crossings per seed
    double convergence_tol = 1e-7;  ///< successive return difference that signals convergence
    double newton_tol = 1e-11;
    int newton_max_iter = 30;
    double dedup_tol = 1e-6;
    int n_votes = 8;
    unsigned threads = 1;
};

struct OrbitSearchReport {
    std::vector<ClosedOrbit> orbits;
    int seeds = 0;
    int converged_seeds = 0;
    double dedup_tol = 0.0;
    /// Why seeds failed to converge; absence of orbits is not a proof of
    /// nonexistence.
    std::vector<std::string> diagnostics;
};

/// Launches n_seeds trajectories of `family` from the annulus between
/// epsilon and the ergosphere in both time directions, detects convergence of
/// the Poincare return map on the ray theta = section_theta, refines each
/// orbit by Newton on the return map and classifies it by the radial motion
/// of the other family sampled at n_votes points.
OrbitSearchReport find_closed_orbits(const PolarMetric2D& metric, Family family, int n_seeds, std::uint64_t seed,
                                     double max_arc, const OrbitSearchOptions& options = {});

/// min r of S+ >= max r of S- for every black/white pair of the report.
bool orbit_nesting_consistent(const std::vector<ClosedOrbit>& orbits, double tol = 1e-8);

struct CensusRun {
    double theta0;
    Family family;
    Fate fate;
    double x0_end;
    double r_end;
    std::string detail;  ///< numerical failure message, if any
};

struct OriginCensusReport {
    double epsilon = 0.0;
    Direction direction = Direction::forward;
    /// epsilon <= 0.1 min |b1| and epsilon < 0.5 min r_e.
    bool in_hypothesis = true;
    std::vector<CensusRun> runs;
    std::vector<CensusRun> violators;
    bool passed() const { return violators.empty(); }
};

/// Default epsilon: 0.05 min|b1| / max(1, max|b1|, max|b2|).
double default_census_epsilon(const PolarMetric2D& metric);

/// n_samples seeded starts on r = epsilon for both families; every run must
/// reach r_floor in the direction of -sign(b1).  epsilon <= 0 selects the
/// default.
OriginCensusReport origin_census(const PolarMetric2D& metric, double epsilon, int n_samples, std::uint64_t seed,
                                 double max_arc = 50.0, const PolarOptions& options = {}, unsigned threads = 1);

}  // namespace horizonlab
