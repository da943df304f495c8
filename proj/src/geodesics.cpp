#include "horizonlab/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "horizonlab/characteristics.hpp"
#include "horizonlab/error.hpp"
#include "horizonlab/parallel.hpp"

namespace horizonlab {

std::string to_string(Family f) { return f == Family::plus ? "plus" : "minus"; }
std::string to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

std::string to_string(Fate f) {
    switch (f) {
        case Fate::hit_origin: return "hit_origin";
        case Fate::escaped: return "escaped";
        case Fate::alive_at_window_end: return "alive_at_window_end";
        case Fate::closed_orbit: return "closed_orbit";
        case Fate::reached_ergosphere: return "reached_ergosphere";
    }
    return "unknown";
}

double default_escape_radius(const RadialMetric& metric) {
    return 10.0 * std::max(1.0, metric.length_scale());
}

namespace {

double family_speed(const RadialMetric& metric, Family family, double x0, double r) {
    const CharSpeeds c = char_speeds(metric, x0, r);
    return family == Family::plus ? c.c_plus : c.c_minus;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Trajectory integrate_radial(const RadialMetric& metric, Family family, double r0, double x0_start,
                            Direction direction, double x0_min, double x0_max,
                            const RadialOptions& options) {
    if (!(options.r_floor > 0.0)) throw PreconditionError("r_floor must be positive");
    if (!(r0 > options.r_floor)) {
        std::ostringstream os;
        os << "initial radius " << r0 << " is not above r_floor = " << options.r_floor;
        throw PreconditionError(os.str());
    }
    if (!(x0_min <= x0_start && x0_start <= x0_max))
        throw PreconditionError("x0_start lies outside the integration window");
    const double r_escape = options.r_escape > 0.0 ? options.r_escape : default_escape_radius(metric);
    if (!(r_escape > r0) && !(r_escape > options.r_floor))
        throw PreconditionError("escape radius must exceed r_floor");
    const double dir = sign_of(direction);
    const double t_end = direction == Direction::forward ? x0_max : x0_min;
    // The r-equation has a square-root singularity in x0 at the origin; the
    // w-equation is nearly linear, so switch well before steps must shrink.
    const double r_switch = std::max(10.0 * options.r_floor, 1e-3 * metric.length_scale());
    const double w_floor = 0.5 * options.r_floor * options.r_floor;
    const double w_back = 0.5 * (2.0 * r_switch) * (2.0 * r_switch);

    Trajectory tr;
    tr.family = family;
    tr.direction = direction;
    auto push = [&](double x, double r) {
        tr.x0.push_back(x);
        tr.r.push_back(r);
    };

    auto escaping = [&](double x, double r) {
        return r >= r_escape && dir * family_speed(metric, family, x, r) >= options.escape_slope;
    };

    double t = x0_start, r = r0;
    push(t, r);
    std::vector<double> dense_x, dense_r;
    double last_dense = -dir * std::numeric_limits<double>::infinity();
    auto take_dense = [&](const std::vector<double>& ts, const std::vector<ode::State<1>>& ys, bool in_w) {
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (dir * (ts[i] - last_dense) <= 0.0) continue;
            last_dense = ts[i];
            dense_x.push_back(ts[i]);
            dense_r.push_back(in_w ? std::sqrt(std::max(0.0, 2.0 * ys[i][0])) : ys[i][0]);
        }
    };
    auto finish = [&](Fate fate) {
        tr.fate = fate;
        tr.x0_end = t;
        tr.r_end = r;
        if (!options.sample_times.empty()) {
            // Sampled output replaces the step record; the end point is kept.
            if (dense_x.empty() || dense_x.back() != t) {
                dense_x.push_back(t);
                dense_r.push_back(r);
            }
            tr.x0 = std::move(dense_x);
            tr.r = std::move(dense_r);
        } else if (tr.x0.back() != t) {
            push(t, r);
        }
        return tr;
    };

    if (escaping(t, r)) return finish(Fate::escaped);

    ode::Options ode_r = options.ode;
    ode_r.record = options.record;
    ode::Options ode_w = ode_r;
    ode_w.atol = options.ode.atol * options.r_floor;

    bool in_w = r < r_switch;
    for (int phase = 0; phase < 10000; ++phase) {
        if (dir * (t_end - t) <= 0.0) return finish(Fate::alive_at_window_end);
        if (!in_w) {
            auto rhs = [&](double x, const ode::State<1>& y) -> ode::State<1> {
                if (!(y[0] > 0.0)) return {kNaN};
                return {family_speed(metric, family, x, y[0])};
            };
            std::vector<ode::Event<1>> events(2);
            events[0].g = [&](double, const ode::State<1>& y) { return y[0] - r_switch; };
            events[0].direction = -1;
            events[1].g = [&](double x, const ode::State<1>& y) {
                if (!(y[0] > 0.0)) return -1.0;
                return std::min(y[0] - r_escape,
                                dir * family_speed(metric, family, x, y[0]) - options.escape_slope);
            };
            events[1].direction = 1;
            auto res = ode::integrate<1>(rhs, t, {r}, t_end, ode_r, events, options.sample_times);
            for (std::size_t i = 1; i < res.t.size(); ++i) push(res.t[i], res.y[i][0]);
            take_dense(res.dense_t, res.dense_y, false);
            t = res.t_final;
            r = res.y_final[0];
            if (res.terminal_event == 0) {
                in_w = true;
                continue;
            }
            if (res.terminal_event == 1) return finish(Fate::escaped);
            return finish(Fate::alive_at_window_end);
        }

        // r c -> b1 as r -> 0 for both families, which continues the
        // w-equation through w = 0 so trial stages may overshoot the floor.
        auto rhs = [&](double x, const ode::State<1>& y) -> ode::State<1> {
            if (!(y[0] > 0.0)) return {metric.b1().value(x)};
            const double rr = std::sqrt(2.0 * y[0]);
            return {rr * family_speed(metric, family, x, rr)};
        };
        std::vector<ode::Event<1>> events(2);
        events[0].g = [&](double, const ode::State<1>& y) { return y[0] - w_floor; };
        events[0].direction = -1;
        events[1].g = [&](double, const ode::State<1>& y) { return y[0] - w_back; };
        events[1].direction = 1;
        auto res = ode::integrate<1>(rhs, t, {0.5 * r * r}, t_end, ode_w, events, options.sample_times);
        for (std::size_t i = 1; i < res.t.size(); ++i) push(res.t[i], std::sqrt(2.0 * std::max(0.0, res.y[i][0])));
        take_dense(res.dense_t, res.dense_y, true);
        t = res.t_final;
        const double w = res.y_final[0];
        r = std::sqrt(2.0 * std::max(0.0, w));
        if (res.terminal_event == 0) {
            const double dw = rhs(t, res.y_final)[0];
            tr.x0_zero = std::isfinite(dw) && dw != 0.0 ? t - w / dw : t;
            return finish(Fate::hit_origin);
        }
        if (res.terminal_event == 1) {
            in_w = false;
            continue;
        }
        return finish(Fate::alive_at_window_end);
    }
    throw NumericalError("radial integration oscillated between near-origin and regular phases");
}

double radial_ode_residual(const RadialMetric& metric, Family family, const std::vector<double>& x0,
                           const std::vector<double>& r) {
    RadialOptions ref;
    ref.ode.atol = 1e-13;
    ref.ode.rtol = 1e-12;
    ref.record = false;
    ref.r_escape = std::numeric_limits<double>::max();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < x0.size(); ++i) {
        const double a = x0[i], b = x0[i + 1];
        if (a == b || std::min(r[i], r[i + 1]) < 10.0 * ref.r_floor) continue;
        const Direction d = b > a ? Direction::forward : Direction::backward;
        ref.sample_times = {b};
        const Trajectory t =
            integrate_radial(metric, family, r[i], a, d, std::min(a, b), std::max(a, b), ref);
        if (t.fate != Fate::alive_at_window_end || t.x0.empty() || t.x0.front() != b) continue;
        worst = std::max(worst, std::abs(t.r.front() - r[i + 1]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// 2D bicharacteristics with xi0 = 0

namespace {

struct PolarDerivs {
    double x0_dot, r_dot, theta_dot;
    double dH_dr, dH_dtheta;
};

PolarDerivs polar_derivs(const PolarSample& s, double r, double xi_r, double xi_theta) {
    const PolarComponents& c = s.value;
    const PolarComponents& dr = s.d_r;
    const PolarComponents& dt = s.d_theta;
    const double eta = xi_theta / r;
    PolarDerivs d;
    d.x0_dot = 2.0 * (c.gr0 * xi_r + c.gt0 * eta);
    d.r_dot = 2.0 * (c.grr * xi_r + c.grt * eta);
    d.theta_dot = 2.0 * (c.grt * xi_r + c.gtt * eta) / r;
    d.dH_dr = dr.grr * xi_r * xi_r + 2.0 * dr.grt * xi_r * eta + dr.gtt * eta * eta -
              2.0 * (c.grt * xi_r * eta + c.gtt * eta * eta) / r;
    d.dH_dtheta = dt.grr * xi_r * xi_r + 2.0 * dt.grt * xi_r * eta + dt.gtt * eta * eta;
    return d;
}

double relative_h(const PolarMetric2D& metric, double r, double theta, double xi_r, double xi_theta) {
    const PolarComponents c = metric.at(r, theta);
    const double eta = xi_theta / r;
    const double h = c.grr * xi_r * xi_r + 2.0 * c.grt * xi_r * eta + c.gtt * eta * eta;
    // Scale by |g| |xi|^2 rather than the sum of terms, which degenerates when
    // a single term survives (e.g. grr = gtt = 0).
    const double scale = (std::abs(c.grr) + 2.0 * std::abs(c.grt) + std::abs(c.gtt)) *
                         (xi_r * xi_r + eta * eta);
    return scale > 0.0 ? std::abs(h) / scale : 0.0;
}

struct NullDirection {
    double xi_r, eta, speed, x0_dot;
};

// Index 0 is the family with +sqrt(-Delta) in xi_r = (-grt +- sqrt(-Delta)) / grr * xi_theta / r,
// index 1 the one with -sqrt(-Delta).  Each root is represented without
// division, so grr = 0 is handled by the equivalent form (gtt, -grt -+ sqrt(-Delta)).
std::array<NullDirection, 2> null_directions(const PolarMetric2D& metric, double r, double theta) {
    const PolarComponents c = metric.at(r, theta);
    const double delta = c.grr * c.gtt - c.grt * c.grt;
    if (!(delta < 0.0)) {
        std::ostringstream os;
        os << "no real xi0 = 0 null covector at r = " << r << ", theta = " << theta
           << " (Delta = " << delta << " is not negative)";
        throw PreconditionError(os.str());
    }
    const double sq = std::sqrt(-delta);
    std::array<NullDirection, 2> out{};
    for (int k = 0; k < 2; ++k) {
        const double sgn = k == 0 ? 1.0 : -1.0;
        double xr = -c.grt + sgn * sq, et = c.grr;
        const double xr2 = c.gtt, et2 = -c.grt - sgn * sq;
        if (std::hypot(xr2, et2) > std::hypot(xr, et)) {
            xr = xr2;
            et = et2;
        }
        const double n = std::hypot(xr, et);
        xr /= n;
        et /= n;
        const double x0_dot = 2.0 * (c.gr0 * xr + c.gt0 * et);
        const double r_dot = 2.0 * (c.grr * xr + c.grt * et);
        if (x0_dot == 0.0)
            throw PreconditionError("null covector with dx0/ds = 0; x0 reparameterization impossible");
        out[static_cast<std::size_t>(k)] = {xr, et, r_dot / x0_dot, x0_dot};
    }
    return out;
}

}  // namespace

double hamiltonian(const PolarMetric2D& metric, const PolarState& s) {
    const PolarComponents c = metric.at(s.r, s.theta);
    const double eta = s.xi_theta / s.r;
    return c.grr * s.xi_r * s.xi_r + 2.0 * c.grt * s.xi_r * eta + c.gtt * eta * eta;
}

double polar_radial_speed(const PolarMetric2D& metric, Family family, double r, double theta) {
    const auto dirs = null_directions(metric, r, theta);
    return dirs[family == Family::plus ? 0 : 1].speed;
}

PolarState initial_polar_state(const PolarMetric2D& metric, Family family, double x0, double r,
                               double theta, Direction direction) {
    if (!(r > 0.0)) throw PreconditionError("2D bicharacteristics need r > 0");
    const auto dirs = null_directions(metric, r, theta);
    const NullDirection& d = dirs[family == Family::plus ? 0 : 1];
    const double sgn = (d.x0_dot > 0.0 ? 1.0 : -1.0) * sign_of(direction);
    double xi_r = sgn * d.xi_r, xi_theta = sgn * d.eta * r;
    const double n = std::hypot(xi_r, xi_theta);
    return {x0, r, theta, xi_r / n, xi_theta / n};
}

PolarRun integrate_polar2d(const PolarMetric2D& metric, const PolarState& init, Family family,
                           Direction direction, double max_arc, const PolarOptions& options) {
    if (!(init.r > options.r_floor)) throw PreconditionError("initial radius must exceed r_floor");
    if (!(max_arc > 0.0)) throw PreconditionError("max_arc must be positive");
    if (metric.b1(init.theta) == 0.0) throw PreconditionError("b1 vanishes; runs near the origin are not radially dominated");
    double r_escape = options.r_escape;
    if (!(r_escape > 0.0)) {
        double scale = 1.0;
        for (int i = 0; i < 64; ++i) {
            const double th = 2.0 * M_PI * i / 64;
            scale = std::max({scale, std::abs(metric.b1(th)), std::abs(metric.b2(th))});
        }
        r_escape = 10.0 * scale;
    }
    const double dir = sign_of(direction);
    const double h0 = relative_h(metric, init.r, init.theta, init.xi_r, init.xi_theta);
    if (h0 > options.h_drift_tolerance)
        throw PreconditionError("initial covector does not satisfy H = 0");
    {
        const PolarDerivs d = polar_derivs(metric.sample(init.r, init.theta), init.r, init.xi_r, init.xi_theta);
        if (!(dir * d.x0_dot > 0.0))
            throw PreconditionError("initial covector does not move in the requested x0 direction");
    }

    using S5 = ode::State<5>;
    auto rhs = [&](double, const S5& y) -> S5 {
        const double r = y[1];
        if (!(r > 0.0)) return {kNaN, kNaN, kNaN, kNaN, kNaN};
        const PolarDerivs d = polar_derivs(metric.sample(r, y[2]), r, y[3], y[4]);
        const double n = std::sqrt(d.x0_dot * d.x0_dot + d.r_dot * d.r_dot +
                                   r * r * d.theta_dot * d.theta_dot);
        double fr = -d.dH_dr / n, ft = -d.dH_dtheta / n;
        // Keep |xi| fixed: only the direction of xi carries information.
        const double xx = y[3] * y[3] + y[4] * y[4];
        const double proj = (fr * y[3] + ft * y[4]) / xx;
        fr -= proj * y[3];
        ft -= proj * y[4];
        return {d.x0_dot / n, d.r_dot / n, d.theta_dot / n, fr, ft};
    };

    double max_drift = h0;
    std::vector<SectionCrossing> crossings;
    std::vector<ode::Event<5>> events(6);
    events[0].g = [&](double, const S5& y) { return y[1] - options.r_floor; };
    events[0].direction = -1;
    events[1].g = [&](double, const S5& y) { return y[1] - r_escape; };
    events[1].direction = 1;
    events[2].g = [&](double, const S5& y) { return metric.delta(y[1], y[2]) + options.ergosphere_margin; };
    events[2].direction = 1;
    events[3].g = [&](double, const S5& y) {
        const PolarDerivs d = polar_derivs(metric.sample(y[1], y[2]), y[1], y[3], y[4]);
        return dir * d.x0_dot;
    };
    events[3].direction = -1;
    events[4].g = [&](double, const S5& y) {
        const double h = relative_h(metric, y[1], y[2], y[3], y[4]);
        max_drift = std::max(max_drift, h);
        return h - options.h_drift_tolerance;
    };
    events[4].direction = 1;
    const double section = options.section_theta.value_or(0.0);
    events[5].g = [&](double, const S5& y) {
        return options.section_theta ? std::sin(y[2] - section) : 1.0;
    };
    events[5].direction = 0;
    events[5].action = [&](const ode::EventHit<5>& hit) {
        if (std::cos(hit.y[2] - section) <= 0.0) return false;
        crossings.push_back({hit.y[0], hit.y[1], hit.y[2], hit.t});
        return options.max_crossings > 0 && crossings.size() >= options.max_crossings;
    };

    ode::Options opt = options.ode;
    opt.record = options.record;
    const S5 y0{init.x0, init.r, init.theta, init.xi_r, init.xi_theta};
    auto res = ode::integrate<5>(rhs, 0.0, y0, max_arc, opt, events);

    PolarRun run;
    Trajectory& tr = run.trajectory;
    tr.family = family;
    tr.direction = direction;
    auto push = [&](const S5& y) {
        tr.x0.push_back(y[0]);
        tr.r.push_back(y[1]);
        tr.theta.push_back(y[2]);
        tr.xi_r.push_back(y[3]);
        tr.xi_theta.push_back(y[4]);
    };
    for (const auto& y : res.y) push(y);
    if (!opt.record) {
        push(y0);
        push(res.y_final);
    }
    tr.x0_end = res.y_final[0];
    tr.r_end = res.y_final[1];
    tr.arc_length = res.t_final;
    tr.max_h_drift = max_drift;
    run.crossings = std::move(crossings);

    switch (res.terminal_event) {
        case 0: tr.fate = Fate::hit_origin; break;
        case 1: tr.fate = Fate::escaped; break;
        case 2: tr.fate = Fate::reached_ergosphere; break;
        case 3: {
            std::ostringstream os;
            os << "dx0/ds changes sign at r = " << tr.r_end << ", x0 = " << tr.x0_end
               << "; x0 reparameterization is invalid";
            throw NumericalError(os.str());
        }
        case 4: {
            std::ostringstream os;
            os << "Hamiltonian drift " << max_drift << " exceeds " << options.h_drift_tolerance
               << " at r = " << tr.r_end << ", x0 = " << tr.x0_end;
            throw NumericalError(os.str());
        }
        default: tr.fate = Fate::alive_at_window_end; break;
    }
    tr.x0_zero = tr.x0_end;
    return run;
}

// ---------------------------------------------------------------------------

namespace {

int fate_rank(Fate f) {
    switch (f) {
        case Fate::hit_origin: return 0;
        case Fate::alive_at_window_end: return 1;
        case Fate::escaped: return 2;
        default: return 1;
    }
}

}  // namespace

CensusTable fate_census(const RadialMetric& metric, Family family, const std::vector<double>& r0_grid,
                        double x0_start, Direction direction, double x0_min, double x0_max,
                        const RadialOptions& options, unsigned threads) {
    if (!std::is_sorted(r0_grid.begin(), r0_grid.end()))
        throw PreconditionError("census grid must be sorted by initial radius");
    CensusTable table{family, direction, x0_start, {}, -1, -1};
    table.entries.resize(r0_grid.size());
    RadialOptions opt = options;
    opt.record = false;
    opt.sample_times.clear();

    parallel_for(r0_grid.size(), threads, [&](std::size_t i) {
        const Trajectory tr = integrate_radial(metric, family, r0_grid[i], x0_start, direction, x0_min, x0_max, opt);
        table.entries[i] = {r0_grid[i], tr.fate, tr.x0_end};
    });

    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        if (i > 0 && fate_rank(table.entries[i].fate) < fate_rank(table.entries[i - 1].fate)) {
            std::ostringstream os;
            os << "non-monotone fate census between r0 = " << table.entries[i - 1].r0 << " ("
               << to_string(table.entries[i - 1].fate) << ") and r0 = " << table.entries[i].r0 << " ("
               << to_string(table.entries[i].fate) << "); tighten the step tolerance";
            throw ResolutionError(os.str());
        }
        if (table.entries[i].fate == Fate::hit_origin) table.last_hit = static_cast<int>(i);
        if (table.entries[i].fate == Fate::escaped && table.first_escape < 0)
            table.first_escape = static_cast<int>(i);
    }
    return table;
}

}  // namespace horizonlab
