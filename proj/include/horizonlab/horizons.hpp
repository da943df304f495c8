#pragma once

#include <optional>
#include <string>
#include <vector>

#include "horizonlab/geodesics.hpp"
#include "horizonlab/metric.hpp"

namespace horizonlab {

enum class HorizonKind { outer_black, inner_black, outer_white, inner_white, dynamic };
enum class HorizonMethod { shooting, picard, formula };

std::string to_string(HorizonKind k);
std::string to_string(HorizonMethod m);
bool is_black(HorizonKind k);

/// Sampled separatrix r = R(x0).  A curve may end early (e.g. a black hole
/// that appears at finite time); samples then cover only part of the window.
struct HorizonCurve {
    HorizonKind kind = HorizonKind::outer_black;
    HorizonMethod method = HorizonMethod::shooting;
    std::vector<double> x0;
    std::vector<double> r;
    std::optional<double> limit_minus_inf;
    std::optional<double> limit_plus_inf;
    /// Bisection diagnostics (shooting only).
    double bracket_width = 0.0;
    double anchor_x0 = 0.0;
    double anchor_r = 0.0;
    /// |propagated curve - bisected value| at the interior anchor.
    double junction_defect = 0.0;

    /// Linear interpolation; throws PreconditionError outside the sampled range.
    double at(double x0) const;
};

struct ShootOptions {
    RadialOptions radial{};
    /// Final bisection bracket width in r.
    double tol = 1e-9;
    /// Interior anchor for the time-consistency check; defaults to the window midpoint.
    std::optional<double> x0_anchor;
    int n_samples = 401;
    /// Length of the fate run beyond each bisection time; 0 selects 200 L.
    double fate_horizon = 0.0;
    int census_points = 48;
    unsigned threads = 1;
};

/// Bisected separatrix value at a single time.
struct SeparatrixPoint {
    double x0;
    double r;
    double lo;
    double hi;
    Fate fate_lo;
    Fate fate_hi;
    int probes;
};

/// Bisection for R(t): black kinds use plus-family fates forward in x0, white
/// kinds minus-family fates backward.  Outer kinds bisect the infimum of the
/// escaped set, inner kinds the supremum of the hit_origin set.
SeparatrixPoint separatrix_at(const RadialMetric& metric, HorizonKind kind, double t,
                              const ShootOptions& options = {});

/// Horizon curve on [x0_min, x0_max] by shooting.  The curve is propagated
/// from the window end in the stable direction (backward for black kinds,
/// forward for white kinds) and cross-checked against an independent
/// bisection at the interior anchor.
HorizonCurve separatrix_shoot(const RadialMetric& metric, HorizonKind kind, double x0_min,
                              double x0_max, const ShootOptions& options = {});

/// Supremum of the hit_origin set (inner horizon); kind must be inner_black or inner_white.
HorizonCurve inner_separatrix(const RadialMetric& metric, HorizonKind kind, double x0_min,
                              double x0_max, const ShootOptions& options = {});

struct PicardOptions {
    double T_init = 0.0;
    int max_iter = 200;
    double tol = 1e-12;
    /// Grid step on [T, X].
    double h = 0.0025;
    /// Truncation: X is where |A'| first stays below this value.
    double derivative_cutoff = 1e-14;
    /// Give up when no truncation point exists before T + scan_limit.
    double scan_limit = 1e4;
    /// Accepted measured Lipschitz ratio.
    double max_lipschitz = 0.9;
    int max_T_enlargements = 40;
    RadialOptions radial{};
    int n_samples = 401;
};

struct PicardState {
    std::vector<double> x0;  ///< grid on [T, X]
    std::vector<double> v;
    double T = 0.0;
    double X = 0.0;
    int iteration = 0;
    double residual = 0.0;
    double lipschitz = 0.0;
    double int_abs_derivative = 0.0;    ///< integral of |A'| over [T, X]
    double int_t_abs_derivative = 0.0;  ///< integral of |t A'| over [T, X]
};

struct PicardResult {
    PicardState state;
    HorizonCurve curve;
};

/// Bounded solution r = |A| + v of dr/dx0 = A/r + 1 through the fixed point
/// v = F(v), F(v)(x) = -int_x^X A'(t) exp(-int_x^t dy / (|A| + v)) dt, with
/// v = 0 beyond the truncation point X.  The curve is extended backward from
/// T to x0_min by integration.
PicardResult picard_bounded_solution(const TimeProfile& A, double x0_min, double x0_max,
                                     const PicardOptions& options = {});

/// One application of F on the state's grid (exposed for contraction tests).
std::vector<double> picard_map(const TimeProfile& A, const std::vector<double>& x0,
                               const std::vector<double>& v);

struct CrossingTime {
    double x0;
    /// Number of sign changes of A found on the window; the latest is used.
    int zero_crossings;
    bool multiple_crossings;
    HorizonCurve branch;
};

/// Time x0^(1) at which the bounded black-hole branch r0^+ reaches the
/// origin going backward.  Needs A >= 0 before and A < 0 after the latest
/// sign change of A on [x0_min, x0_max].
CrossingTime appearance_time(const RadialMetric& metric, double x0_min, double x0_max,
                             const ShootOptions& options = {});

/// Time x0^(2) at which the white-hole branch r0^- reaches the origin going
/// forward.  Needs A > 0 before and A <= 0 after the latest sign change.
CrossingTime disappearance_time(const RadialMetric& metric, double x0_min, double x0_max,
                                const ShootOptions& options = {});

/// r = |A(x0)| sampled on the window (acoustic metrics only).
HorizonCurve dynamic_horizon(const RadialMetric& metric, double x0_min, double x0_max, int n = 401);

enum class Containment { event_inside_dynamic, dynamic_inside_event, coincident, mixed };
std::string to_string(Containment c);

struct ContainmentReport {
    Containment observed;
    /// From the monotonicity of |A|: decreasing -> event inside dynamic.
    Containment expected;
    double max_excess_event;    ///< max(R - |A|) over the samples
    double max_excess_dynamic;  ///< max(|A| - R) over the samples
    std::size_t samples;
    bool consistent() const { return observed == expected || observed == Containment::coincident; }
};

/// Compares the event horizon with r = |A| at every sample of `event` within tolerance.
ContainmentReport containment(const HorizonCurve& event, const RadialMetric& metric,
                              double tolerance = 1e-8);

/// Acoustic-like radial metric whose velocity coefficient depends on r:
/// g00 = 1, gr0 = a(r)/r, grr = a(r)^2/r^2 - 1 with
/// a(r) = base - amplitude exp(-(r - center)^2 / (2 width^2)).
/// With base < 0 and a large enough bump, c_plus = a/r + 1 has three zeros
/// and the inner and outer black-hole horizons differ.
RadialMetric radial_bump_metric(double base, double amplitude, double center, double width);

}  // namespace horizonlab
