#include "horizonlab/horizons.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "horizonlab/characteristics.hpp"
#include "horizonlab/error.hpp"

namespace horizonlab {

std::string to_string(HorizonKind k) {
    switch (k) {
        case HorizonKind::outer_black: return "outer-black";
        case HorizonKind::inner_black: return "inner-black";
        case HorizonKind::outer_white: return "outer-white";
        case HorizonKind::inner_white: return "inner-white";
        case HorizonKind::dynamic: return "dynamic";
    }
    return "unknown";
}

std::string to_string(HorizonMethod m) {
    switch (m) {
        case HorizonMethod::shooting: return "shooting";
        case HorizonMethod::picard: return "picard";
        case HorizonMethod::formula: return "formula";
    }
    return "unknown";
}

std::string to_string(Containment c) {
    switch (c) {
        case Containment::event_inside_dynamic: return "event-inside-dynamic";
        case Containment::dynamic_inside_event: return "dynamic-inside-event";
        case Containment::coincident: return "coincident";
        case Containment::mixed: return "mixed";
    }
    return "unknown";
}

bool is_black(HorizonKind k) { return k == HorizonKind::outer_black || k == HorizonKind::inner_black; }

namespace {

bool is_outer(HorizonKind k) { return k == HorizonKind::outer_black || k == HorizonKind::outer_white; }

std::vector<double> sample_grid(double a, double b, int n) {
    if (n < 2) return {a};
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    g.back() = b;
    return g;
}

void set_acoustic_limits(HorizonCurve& c, const RadialMetric& metric) {
    const TimeProfile* A = metric.acoustic_profile();
    if (!A) return;
    const bool black = is_black(c.kind);
    auto limit = [&](double a) -> std::optional<double> {
        if (black ? a < 0.0 : a > 0.0) return std::abs(a);
        return std::nullopt;
    };
    c.limit_minus_inf = limit(A->limit_minus());
    c.limit_plus_inf = limit(A->limit_plus());
}

Family kind_family(HorizonKind k) { return is_black(k) ? Family::plus : Family::minus; }
Direction fate_direction(HorizonKind k) { return is_black(k) ? Direction::forward : Direction::backward; }

}  // namespace

double HorizonCurve::at(double t) const {
    if (x0.empty() || t < x0.front() || t > x0.back())
        throw PreconditionError("horizon curve queried outside its sampled range");
    auto it = std::lower_bound(x0.begin(), x0.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - x0.begin());
    if (x0[i] == t) return r[i];
    const double w = (t - x0[i - 1]) / (x0[i] - x0[i - 1]);
    return (1.0 - w) * r[i - 1] + w * r[i];
}

SeparatrixPoint separatrix_at(const RadialMetric& metric, HorizonKind kind, double t,
                              const ShootOptions& options) {
    if (kind == HorizonKind::dynamic) throw PreconditionError("the dynamic horizon is not a separatrix");
    if (!(options.tol > 0.0)) throw PreconditionError("bisection tolerance must be positive");
    const Family family = kind_family(kind);
    const Direction dir = fate_direction(kind);
    const double L = metric.length_scale();
    const double H = options.fate_horizon > 0.0 ? options.fate_horizon : 200.0 * L;
    const double lo_t = dir == Direction::forward ? t : t - H;
    const double hi_t = dir == Direction::forward ? t + H : t;
    RadialOptions ro = options.radial;
    ro.record = false;
    ro.sample_times.clear();
    const double r_escape = ro.r_escape > 0.0 ? ro.r_escape : default_escape_radius(metric);
    ro.r_escape = r_escape;

    const double r_min = 100.0 * ro.r_floor;
    const double r_max = 0.999 * r_escape;
    const int n = std::max(4, options.census_points);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        grid[static_cast<std::size_t>(i)] = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n - 1));
    const CensusTable census = fate_census(metric, family, grid, t, dir, lo_t, hi_t, ro, options.threads);
    const bool any_alive = std::any_of(census.entries.begin(), census.entries.end(),
                                       [](const CensusEntry& e) { return e.fate == Fate::alive_at_window_end; });

    auto describe = [&](const std::string& what) {
        std::ostringstream os;
        os << what << " for the " << to_string(kind) << " horizon at x0 = " << t << " (radii "
           << r_min << " to " << r_max << ", fate horizon " << H << ")";
        return os.str();
    };

    const bool outer = is_outer(kind);
    auto in_upper = [&](Fate f) { return outer ? f == Fate::escaped : f != Fate::hit_origin; };
    std::size_t upper;
    if (outer) {
        if (census.first_escape < 0) {
            if (any_alive) throw WindowTooShortError(describe("no trajectory resolved to escape"));
            throw NoHorizonError(describe("no escaping trajectory"));
        }
        if (census.first_escape == 0) throw NoHorizonError(describe("every trajectory escapes"));
        upper = static_cast<std::size_t>(census.first_escape);
    } else {
        if (census.last_hit < 0) {
            if (any_alive) throw WindowTooShortError(describe("no trajectory resolved to the origin"));
            throw NoHorizonError(describe("no trajectory reaches the origin"));
        }
        if (census.last_hit == n - 1) throw NoHorizonError(describe("every trajectory reaches the origin"));
        upper = static_cast<std::size_t>(census.last_hit + 1);
    }

    SeparatrixPoint p{t, 0.0, grid[upper - 1], grid[upper], census.entries[upper - 1].fate,
                      census.entries[upper].fate, 0};
    while (p.hi - p.lo > options.tol) {
        const double mid = 0.5 * (p.lo + p.hi);
        if (mid <= p.lo || mid >= p.hi) break;
        const Trajectory tr = integrate_radial(metric, family, mid, t, dir, lo_t, hi_t, ro);
        ++p.probes;
        if (in_upper(tr.fate)) {
            p.hi = mid;
            p.fate_hi = tr.fate;
        } else {
            p.lo = mid;
            p.fate_lo = tr.fate;
        }
    }
    p.r = 0.5 * (p.lo + p.hi);
    return p;
}

namespace {

HorizonCurve shoot_curve(const RadialMetric& metric, HorizonKind kind, double x0_min, double x0_max,
                         const ShootOptions& options) {
    if (!(x0_min < x0_max)) throw PreconditionError("horizon window must have x0_min < x0_max");
    const bool black = is_black(kind);
    const Family family = kind_family(kind);
    const Direction prop = black ? Direction::backward : Direction::forward;
    const double end = black ? x0_max : x0_min;
    const double anchor = options.x0_anchor.value_or(0.5 * (x0_min + x0_max));
    if (anchor < x0_min || anchor > x0_max) throw PreconditionError("anchor lies outside the window");

    const SeparatrixPoint p_end = separatrix_at(metric, kind, end, options);

    RadialOptions ro = options.radial;
    ro.record = false;
    ro.sample_times = sample_grid(x0_min, x0_max, options.n_samples);
    if (prop == Direction::backward) std::reverse(ro.sample_times.begin(), ro.sample_times.end());
    const Trajectory tr = integrate_radial(metric, family, p_end.r, end, prop, x0_min, x0_max, ro);

    HorizonCurve c;
    c.kind = kind;
    c.method = HorizonMethod::shooting;
    c.x0 = tr.x0;
    c.r = tr.r;
    if (prop == Direction::backward) {
        std::reverse(c.x0.begin(), c.x0.end());
        std::reverse(c.r.begin(), c.r.end());
    }
    c.bracket_width = p_end.hi - p_end.lo;
    c.anchor_x0 = anchor;

    if (anchor != end) {
        const SeparatrixPoint p_mid = separatrix_at(metric, kind, anchor, options);
        c.anchor_r = p_mid.r;
        RadialOptions ra = options.radial;
        ra.record = false;
        ra.sample_times = {anchor};
        const Trajectory to_anchor = integrate_radial(metric, family, p_end.r, end, prop,
                                                      std::min(anchor, end), std::max(anchor, end), ra);
        if (!to_anchor.x0.empty() && to_anchor.x0.front() == anchor)
            c.junction_defect = std::abs(to_anchor.r.front() - p_mid.r);
        else
            c.junction_defect = std::numeric_limits<double>::infinity();
    } else {
        c.anchor_r = p_end.r;
    }
    set_acoustic_limits(c, metric);
    return c;
}

}  // namespace

HorizonCurve separatrix_shoot(const RadialMetric& metric, HorizonKind kind, double x0_min, double x0_max,
                              const ShootOptions& options) {
    if (kind == HorizonKind::dynamic) throw PreconditionError("use dynamic_horizon for the dynamic kind");
    return shoot_curve(metric, kind, x0_min, x0_max, options);
}

HorizonCurve inner_separatrix(const RadialMetric& metric, HorizonKind kind, double x0_min, double x0_max,
                              const ShootOptions& options) {
    if (kind != HorizonKind::inner_black && kind != HorizonKind::inner_white)
        throw PreconditionError("inner_separatrix needs an inner kind");
    return shoot_curve(metric, kind, x0_min, x0_max, options);
}

// ---------------------------------------------------------------------------
// Picard iteration

namespace {

struct PicardGrid {
    std::vector<double> x, dA, absA;  // at nodes
    std::vector<double> dA_mid, absA_mid;  // at cell midpoints
};

PicardGrid make_grid(const TimeProfile& A, const std::vector<double>& x) {
    PicardGrid g;
    g.x = x;
    const std::size_t n = x.size();
    g.dA.resize(n);
    g.absA.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.dA[i] = A.derivative(x[i]);
        g.absA[i] = std::abs(A.value(x[i]));
    }
    g.dA_mid.resize(n ? n - 1 : 0);
    g.absA_mid.resize(n ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double m = 0.5 * (x[i] + x[i + 1]);
        g.dA_mid[i] = A.derivative(m);
        g.absA_mid[i] = std::abs(A.value(m));
    }
    return g;
}

// F(v) by the backward recursion I_i = cell_i + exp(-dP_i) I_{i+1}, with
// Simpson cells and v linear within each cell.
std::vector<double> apply_map(const PicardGrid& g, const std::vector<double>& v) {
    const std::size_t n = g.x.size();
    std::vector<double> out(n, 0.0);
    double I = 0.0;
    for (std::size_t k = n - 1; k-- > 0;) {
        const double h = g.x[k + 1] - g.x[k];
        const double fi = 1.0 / (g.absA[k] + v[k]);
        const double fj = 1.0 / (g.absA[k + 1] + v[k + 1]);
        const double fm = 1.0 / (g.absA_mid[k] + 0.5 * (v[k] + v[k + 1]));
        const double dP = h * (fi + 4.0 * fm + fj) / 6.0;
        const double dP_half = h * (5.0 * fi + 8.0 * fm - fj) / 24.0;
        const double cell =
            h * (g.dA[k] + 4.0 * g.dA_mid[k] * std::exp(-dP_half) + g.dA[k + 1] * std::exp(-dP)) / 6.0;
        I = cell + std::exp(-dP) * I;
        out[k] = -I;
    }
    return out;
}

double sup_norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

struct Truncation {
    double X;
    double int_abs;
    double int_t_abs;
    bool found;
};

// Graded scan for the first point after which |A'| stays below the cutoff.
Truncation find_truncation(const TimeProfile& A, double T, const PicardOptions& o) {
    Truncation tr{T, 0.0, 0.0, false};
    constexpr int kStay = 50;
    double x = T, prev_abs = std::abs(A.derivative(T)), prev_t = std::abs(T) * prev_abs;
    double candidate = std::numeric_limits<double>::quiet_NaN();
    int below = 0;
    while (x < T + o.scan_limit) {
        const double step = std::max(0.01, 0.01 * (x - T));
        const double xn = x + step;
        const double d = std::abs(A.derivative(xn));
        const double dt = std::abs(xn) * d;
        tr.int_abs += 0.5 * step * (prev_abs + d);
        tr.int_t_abs += 0.5 * step * (prev_t + dt);
        prev_abs = d;
        prev_t = dt;
        x = xn;
        if (d < o.derivative_cutoff) {
            if (below == 0) candidate = x;
            if (++below >= kStay) {
                tr.X = candidate;
                tr.found = true;
                return tr;
            }
        } else {
            below = 0;
        }
    }
    return tr;
}

std::vector<double> picard_nodes(double T, double X, double h) {
    // Uniform spacing h on [T, T + 50], then growing linearly with x - T.
    constexpr double kUniform = 50.0;
    std::vector<double> x{T};
    while (x.back() < X) {
        const double d = x.back() - T;
        const double step = h * std::max(1.0, d / kUniform);
        x.push_back(std::min(X, x.back() + step));
        if (X - x.back() < 1e-3 * h) x.back() = X;
    }
    return x;
}

}  // namespace

std::vector<double> picard_map(const TimeProfile& A, const std::vector<double>& x0, const std::vector<double>& v) {
    if (x0.size() != v.size() || x0.size() < 2) throw PreconditionError("picard_map needs matching grids");
    return apply_map(make_grid(A, x0), v);
}

PicardResult picard_bounded_solution(const TimeProfile& A, double x0_min, double x0_max,
                                     const PicardOptions& o) {
    if (!(A.sup() < 0.0)) throw PreconditionError("Picard construction needs A(x0) <= A0 < 0 everywhere");
    if (!(x0_min < x0_max)) throw PreconditionError("window must have x0_min < x0_max");
    if (!(o.h > 0.0) || o.max_iter < 1) throw PreconditionError("invalid Picard options");
    const double A0 = std::abs(A.sup());
    const double ball = 0.5 * A0;

    double T = o.T_init;
    double last_lipschitz = std::numeric_limits<double>::quiet_NaN();
    for (int attempt = 0; attempt <= o.max_T_enlargements; ++attempt) {
        const Truncation trunc = find_truncation(A, T, o);
        if (!trunc.found) {
            std::ostringstream os;
            os << "A' does not decay below " << o.derivative_cutoff << " on [" << T << ", " << T + o.scan_limit
               << "]; measured integral |A'| = " << trunc.int_abs << ", integral |t A'| = " << trunc.int_t_abs;
            throw ContractionError(os.str(), last_lipschitz, trunc.int_abs, trunc.int_t_abs);
        }
        const double step_T = std::max(1.0, 0.25 * std::abs(T));
        if (!(trunc.int_abs < ball)) {
            last_lipschitz = std::numeric_limits<double>::quiet_NaN();
            T += step_T;
            continue;
        }

        const PicardGrid grid = make_grid(A, picard_nodes(T, std::max(trunc.X, T + 10.0 * o.h), o.h));
        std::vector<double> v(grid.x.size(), 0.0), prev_v;
        double residual = std::numeric_limits<double>::infinity(), prev_residual = 0.0;
        double lipschitz = 0.0;
        int it = 0;
        bool converged = false;
        while (it < o.max_iter) {
            std::vector<double> next = apply_map(grid, v);
            ++it;
            if (!(sup_norm(next) < ball)) {
                std::ostringstream os;
                os << "Picard iterate left the ball ||v|| < |A0|/2 = " << ball << " at iteration " << it;
                throw ContractionError(os.str(), lipschitz, trunc.int_abs, trunc.int_t_abs);
            }
            prev_residual = residual;
            residual = sup_diff(next, v);
            if (it >= 3 && prev_residual > 1e-13) lipschitz = std::max(lipschitz, residual / prev_residual);
            prev_v = std::move(v);
            v = std::move(next);
            if (residual < o.tol) {
                converged = true;
                break;
            }
        }

        // Probe pairs around the fixed point measure the local Lipschitz ratio.
        const double delta = 0.05 * A0;
        const std::size_t n = v.size();
        std::vector<double> p1(n), p2(n), p3(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(n - 1);
            p1[i] = v[i] + delta;
            p2[i] = v[i] + delta * std::cos(6.0 * s);
            p3[i] = v[i] - delta * (1.0 - s);
        }
        const auto Fv = apply_map(grid, v);
        for (const auto* p : {&p1, &p2, &p3}) {
            const double dn = sup_diff(*p, v);
            if (dn > 0.0) lipschitz = std::max(lipschitz, sup_diff(apply_map(grid, *p), Fv) / dn);
        }
        {
            const std::vector<double> zero(n, 0.0);
            const double dn = sup_norm(v);
            if (dn > 1e-10) lipschitz = std::max(lipschitz, sup_diff(Fv, apply_map(grid, zero)) / dn);
        }
        last_lipschitz = lipschitz;
        if (!(lipschitz < o.max_lipschitz) || !converged) {
            T += step_T;
            continue;
        }

        PicardResult res;
        res.state.x0 = grid.x;
        res.state.v = v;
        res.state.T = T;
        res.state.X = grid.x.back();
        res.state.iteration = it;
        res.state.residual = residual;
        res.state.lipschitz = lipschitz;
        res.state.int_abs_derivative = trunc.int_abs;
        res.state.int_t_abs_derivative = trunc.int_t_abs;

        // Assemble the curve on the requested window.
        HorizonCurve& c = res.curve;
        c.kind = HorizonKind::outer_black;
        c.method = HorizonMethod::picard;
        c.limit_minus_inf = std::abs(A.limit_minus());
        c.limit_plus_inf = std::abs(A.limit_plus());
        const std::vector<double> out = sample_grid(x0_min, x0_max, o.n_samples);
        const auto& gx = grid.x;
        auto slope = [&](double x, double r) { return A.value(x) / r + 1.0; };
        auto r_node = [&](std::size_t i) { return grid.absA[i] + v[i]; };

        std::vector<double> back_times;
        for (double x : out)
            if (x < T) back_times.push_back(x);
        std::vector<double> back_r(back_times.size());
        if (!back_times.empty()) {
            std::reverse(back_times.begin(), back_times.end());
            RadialOptions ro = o.radial;
            ro.record = false;
            ro.sample_times = back_times;
            const RadialMetric m = acoustic_to_radial(A);
            const Trajectory tr =
                integrate_radial(m, Family::plus, r_node(0), T, Direction::backward, back_times.back(), T, ro);
            for (std::size_t i = 0; i < back_times.size(); ++i) {
                if (i < tr.x0.size() && tr.x0[i] == back_times[i]) back_r[i] = tr.r[i];
                else throw NumericalError("backward extension of the Picard solution ended early");
            }
            std::reverse(back_times.begin(), back_times.end());
            std::reverse(back_r.begin(), back_r.end());
        }
        std::size_t bi = 0;
        for (double x : out) {
            double r;
            if (x < T) {
                r = back_r[bi++];
            } else if (x >= gx.back()) {
                r = std::abs(A.value(x));
            } else {
                auto it2 = std::upper_bound(gx.begin(), gx.end(), x);
                const std::size_t k = static_cast<std::size_t>(it2 - gx.begin()) - 1;
                const double h = gx[k + 1] - gx[k];
                const double s = (x - gx[k]) / h;
                const double ra = r_node(k), rb = r_node(k + 1);
                const double ma = slope(gx[k], ra) * h, mb = slope(gx[k + 1], rb) * h;
                const double s2 = s * s, s3 = s2 * s;
                r = (2 * s3 - 3 * s2 + 1) * ra + (s3 - 2 * s2 + s) * ma + (-2 * s3 + 3 * s2) * rb + (s3 - s2) * mb;
            }
            c.x0.push_back(x);
            c.r.push_back(r);
        }
        c.anchor_x0 = T;
        c.anchor_r = r_node(0);
        return res;
    }
    std::ostringstream os;
    os << "no contracting Picard setup after " << o.max_T_enlargements << " enlargements of T (reached T = " << T
       << ", measured Lipschitz ratio " << last_lipschitz << ")";
    const Truncation trunc = find_truncation(A, T, o);
    throw ContractionError(os.str(), last_lipschitz, trunc.int_abs, trunc.int_t_abs);
}

// ---------------------------------------------------------------------------
// Appearance and disappearance

namespace {

struct SignChange {
    double x;
    int count;
};

// Latest sign change of A on the window where `before` holds to the left and
// `after` to the right.
template <typename Before, typename After>
SignChange latest_sign_change(const TimeProfile& A, double a, double b, Before before, After after) {
    constexpr int kSamples = 20001;
    SignChange sc{0.0, 0};
    double prev = A.value(a);
    double xp = a;
    for (int i = 1; i < kSamples; ++i) {
        const double x = a + (b - a) * i / (kSamples - 1);
        const double v = A.value(x);
        if ((prev >= 0.0) != (v >= 0.0) || (prev > 0.0) != (v > 0.0)) {
            if (before(prev) && after(v)) {
                ++sc.count;
                sc.x = x;
            } else if ((prev < 0.0) != (v < 0.0)) {
                ++sc.count;
            }
        }
        prev = v;
        xp = x;
    }
    (void)xp;
    return sc;
}

}  // namespace

CrossingTime appearance_time(const RadialMetric& metric, double x0_min, double x0_max,
                             const ShootOptions& options) {
    const TimeProfile* A = metric.acoustic_profile();
    if (!A) throw PreconditionError("appearance_time needs an acoustic metric");
    if (!(x0_min < x0_max)) throw PreconditionError("window must have x0_min < x0_max");
    if (!(A->value(x0_max) < 0.0)) throw PreconditionError("A must be negative at the end of the window");
    const SignChange sc = latest_sign_change(
        *A, x0_min, x0_max, [](double v) { return v >= 0.0; }, [](double v) { return v < 0.0; });
    if (sc.count == 0) throw PreconditionError("A has no sign change from >= 0 to < 0 on the window");

    const SeparatrixPoint p = separatrix_at(metric, HorizonKind::outer_black, x0_max, options);
    RadialOptions ro = options.radial;
    ro.record = false;
    ro.sample_times = sample_grid(x0_min, x0_max, options.n_samples);
    std::reverse(ro.sample_times.begin(), ro.sample_times.end());
    const Trajectory tr = integrate_radial(metric, Family::plus, p.r, x0_max, Direction::backward, x0_min, x0_max, ro);
    if (tr.fate != Fate::hit_origin)
        throw WindowTooShortError("the black-hole branch does not reach r = 0 inside the window");

    CrossingTime out;
    out.x0 = tr.x0_zero;
    out.zero_crossings = sc.count;
    out.multiple_crossings = sc.count > 1;
    out.branch.kind = HorizonKind::outer_black;
    out.branch.method = HorizonMethod::shooting;
    out.branch.x0.assign(tr.x0.rbegin(), tr.x0.rend());
    out.branch.r.assign(tr.r.rbegin(), tr.r.rend());
    out.branch.bracket_width = p.hi - p.lo;
    out.branch.anchor_x0 = x0_max;
    out.branch.anchor_r = p.r;
    return out;
}

CrossingTime disappearance_time(const RadialMetric& metric, double x0_min, double x0_max,
                                const ShootOptions& options) {
    const TimeProfile* A = metric.acoustic_profile();
    if (!A) throw PreconditionError("disappearance_time needs an acoustic metric");
    if (!(x0_min < x0_max)) throw PreconditionError("window must have x0_min < x0_max");
    if (!(A->value(x0_min) > 0.0)) throw PreconditionError("A must be positive at the start of the window");
    const SignChange sc = latest_sign_change(
        *A, x0_min, x0_max, [](double v) { return v > 0.0; }, [](double v) { return v <= 0.0; });
    if (sc.count == 0) throw PreconditionError("A has no sign change from > 0 to <= 0 on the window");

    const SeparatrixPoint p = separatrix_at(metric, HorizonKind::outer_white, x0_min, options);
    RadialOptions ro = options.radial;
    ro.record = false;
    ro.sample_times = sample_grid(x0_min, x0_max, options.n_samples);
    const Trajectory tr = integrate_radial(metric, Family::minus, p.r, x0_min, Direction::forward, x0_min, x0_max, ro);
    if (tr.fate != Fate::hit_origin)
        throw WindowTooShortError("the white-hole branch does not reach r = 0 inside the window");

    CrossingTime out;
    out.x0 = tr.x0_zero;
    out.zero_crossings = sc.count;
    out.multiple_crossings = sc.count > 1;
    out.branch.kind = HorizonKind::outer_white;
    out.branch.method = HorizonMethod::shooting;
    out.branch.x0 = tr.x0;
    out.branch.r = tr.r;
    out.branch.bracket_width = p.hi - p.lo;
    out.branch.anchor_x0 = x0_min;
    out.branch.anchor_r = p.r;
    return out;
}

// ---------------------------------------------------------------------------

HorizonCurve dynamic_horizon(const RadialMetric& metric, double x0_min, double x0_max, int n) {
    const TimeProfile* A = metric.acoustic_profile();
    if (!A) throw PreconditionError("the dynamic horizon r = |A| needs an acoustic metric");
    HorizonCurve c;
    c.kind = HorizonKind::dynamic;
    c.method = HorizonMethod::formula;
    for (double x : sample_grid(x0_min, x0_max, n)) {
        const double a = A->value(x);
        if (!(a < 0.0)) throw PreconditionError("dynamic horizon needs A(x0) < 0 on the window");
        c.x0.push_back(x);
        c.r.push_back(-a);
    }
    c.limit_minus_inf = std::abs(A->limit_minus());
    c.limit_plus_inf = std::abs(A->limit_plus());
    return c;
}

ContainmentReport containment(const HorizonCurve& event, const RadialMetric& metric, double tolerance) {
    const TimeProfile* A = metric.acoustic_profile();
    if (!A) throw PreconditionError("containment needs an acoustic metric");
    if (event.x0.empty()) throw PreconditionError("empty horizon curve");
    ContainmentReport rep{Containment::mixed, Containment::mixed, -std::numeric_limits<double>::infinity(),
                          -std::numeric_limits<double>::infinity(), event.x0.size()};
    bool nonincreasing = true, nondecreasing = true, constant = true;
    double prev = std::abs(A->value(event.x0.front()));
    for (std::size_t i = 0; i < event.x0.size(); ++i) {
        const double a = std::abs(A->value(event.x0[i]));
        rep.max_excess_event = std::max(rep.max_excess_event, event.r[i] - a);
        rep.max_excess_dynamic = std::max(rep.max_excess_dynamic, a - event.r[i]);
        if (a > prev) nonincreasing = false;
        if (a < prev) nondecreasing = false;
        if (a != prev) constant = false;
        prev = a;
    }
    const bool ev_in = rep.max_excess_event <= tolerance;
    const bool dyn_in = rep.max_excess_dynamic <= tolerance;
    rep.observed = ev_in && dyn_in ? Containment::coincident
                   : ev_in         ? Containment::event_inside_dynamic
                   : dyn_in        ? Containment::dynamic_inside_event
                                   : Containment::mixed;
    rep.expected = constant         ? Containment::coincident
                   : nonincreasing  ? Containment::event_inside_dynamic
                   : nondecreasing  ? Containment::dynamic_inside_event
                                    : Containment::mixed;
    return rep;
}

RadialMetric radial_bump_metric(double base, double amplitude, double center, double width) {
    if (!(width > 0.0)) throw PreconditionError("bump width must be positive");
    auto a = [=](double r) {
        const double z = (r - center) / width;
        return base - amplitude * std::exp(-0.5 * z * z);
    };
    const double b1 = a(0.0);
    const double scale = std::max({1.0, std::abs(base), std::abs(base) + std::abs(amplitude), center});
    return RadialMetric::custom(
        [a](double, double r) {
            const double g = a(r) / r;
            return RadialComponents{1.0, g, g * g - 1.0};
        },
        TimeProfile::constant(b1), scale, "radial-bump");
}

}  // namespace horizonlab
