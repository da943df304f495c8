// Acceptance criteria: one PASS/FAIL line per criterion with its runtime.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "horizonlab/characteristics.hpp"
#include "horizonlab/error.hpp"
#include "horizonlab/geodesics.hpp"
#include "horizonlab/horizons.hpp"
#include "horizonlab/metric.hpp"
#include "horizonlab/stationary2d.hpp"
#include "horizonlab/waves.hpp"

using namespace horizonlab;

namespace {

/// Collects named checks; a criterion passes when all of them hold.
struct Checks {
    bool ok = true;
    std::ostringstream notes;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes << " [failed: " << what << "]";
        }
    }
    template <typename T>
    void note(const std::string& key, T value) {
        notes << ' ' << key << '=' << value;
    }
};

RadialMetric acoustic(double a) { return acoustic_to_radial(TimeProfile::constant(a)); }
TimeProfile ramp() { return TimeProfile::tanh_ramp(-2.0, 0.5); }

double sup_deviation(const HorizonCurve& c, double value) {
    double d = 0.0;
    for (double r : c.r) d = std::max(d, std::abs(r - value));
    return d;
}

void constant_black_hole(Checks& c) {
    const auto m = acoustic(-1.0);
    const auto R = separatrix_shoot(m, HorizonKind::outer_black, -10, 10);
    const double dev = sup_deviation(R, 1.0);
    c.note("sup|R+-1|", dev);
    c.require(dev <= 1e-6, "R+ = 1 within 1e-6 on [-10, 10]");
    for (double r0 : {0.2, 0.5, 0.9}) {
        const auto t = integrate_radial(m, Family::plus, r0, 0.0, Direction::forward, -10, 10);
        c.require(t.fate == Fate::hit_origin, "plus run from r0 < 1 hits the origin");
    }
    for (double r0 : {1.1, 2.0, 5.0}) {
        const auto t = integrate_radial(m, Family::plus, r0, 0.0, Direction::forward, -10, 100);
        c.require(t.fate == Fate::escaped, "plus run from r0 > 1 escapes");
    }
}

void ramp_limits(Checks& c) {
    const auto A = ramp();
    const auto m = acoustic_to_radial(A);
    ShootOptions so;
    so.n_samples = 1001;
    const auto shoot = separatrix_shoot(m, HorizonKind::outer_black, -50, 50, so);
    const double lo = std::abs(shoot.at(-50) - 2.5), hi = std::abs(shoot.at(50) - 1.5);
    c.note("|R+(-50)-2.5|", lo);
    c.note("|R+(50)-1.5|", hi);
    c.require(lo <= 1e-3 && hi <= 1e-3, "limits 2.5 and 1.5 within 1e-3");
    PicardOptions po;
    po.n_samples = 1001;
    const auto pic = picard_bounded_solution(A, -50, 50, po);
    double worst = 0.0;
    for (std::size_t i = 0; i < shoot.x0.size(); ++i)
        if (shoot.x0[i] >= pic.state.T && shoot.x0[i] <= pic.state.T + 50)
            worst = std::max(worst, std::abs(shoot.r[i] - pic.curve.at(shoot.x0[i])));
    c.note("T", pic.state.T);
    c.note("sup|shoot-picard|", worst);
    c.require(worst <= 1e-5, "shooting and Picard agree to 1e-5 on [T, T+50]");
}

void white_hole_mirror(Checks& c) {
    const auto m = acoustic(1.0);
    const auto R = separatrix_shoot(m, HorizonKind::outer_white, -10, 10);
    const double dev = sup_deviation(R, 1.0);
    c.note("sup|R--1|", dev);
    c.require(dev <= 1e-6, "R- = 1 within 1e-6");
    for (double r0 : {0.2, 0.5, 0.9}) {
        const auto t = integrate_radial(m, Family::minus, r0, 0.0, Direction::backward, -10, 10);
        c.require(t.fate == Fate::hit_origin, "minus run from r0 < 1 reaches the origin backward");
    }
}

void appearance(Checks& c) {
    const auto m = acoustic_to_radial(TimeProfile::tanh_ramp(0.0, -1.0));
    const auto app = appearance_time(m, -10, 10);
    ShootOptions tight;
    tight.tol /= 10;
    tight.radial.ode.atol /= 10;
    tight.radial.ode.rtol /= 10;
    const auto app_t = appearance_time(m, -10, 10, tight);
    const auto dis = disappearance_time(m, -10, 10);
    c.note("x0(1)", app.x0);
    c.note("tightening_shift", std::abs(app.x0 - app_t.x0));
    c.note("x0(2)", dis.x0);
    c.require(std::isfinite(app.x0) && app.x0 < 0.0, "finite appearance time below zero");
    c.require(std::abs(app.x0 - app_t.x0) <= 1e-6, "stable to 1e-6 under 10x tighter tolerances");
    c.require(std::isfinite(dis.x0) && dis.x0 > 0.0, "finite disappearance time above zero");
}

void origin_census_check(Checks& c) {
    const auto sink = origin_census(PolarMetric2D::acoustic(-1.0, 0.5), 0.05, 50, 11);
    const auto source = origin_census(PolarMetric2D::acoustic(1.0, 0.5), 0.05, 50, 11);
    auto count_hits = [](const OriginCensusReport& r) {
        return std::count_if(r.runs.begin(), r.runs.end(), [](const auto& x) { return x.fate == Fate::hit_origin; });
    };
    c.note("sink_hits", std::to_string(count_hits(sink)) + "/" + std::to_string(sink.runs.size()));
    c.note("source_hits", std::to_string(count_hits(source)) + "/" + std::to_string(source.runs.size()));
    c.require(sink.runs.size() == 100 && sink.passed() && sink.direction == Direction::forward,
              "A = -1: 50/50 of both families reach r_floor forward");
    c.require(source.runs.size() == 100 && source.passed() && source.direction == Direction::backward,
              "A = +1: 50/50 of both families reach r_floor backward");
}

void closed_orbit(Checks& c) {
    const auto m = PolarMetric2D::acoustic(-1.0, 1.0);
    const auto rep = find_closed_orbits(m, Family::plus, 6, 7, 400.0);
    c.note("orbits", rep.orbits.size());
    c.require(rep.orbits.size() == 1, "exactly one closed orbit");
    if (rep.orbits.size() == 1) {
        const auto& o = rep.orbits.front();
        const double dev = std::max(std::abs(o.min_r() - 1.0), std::abs(o.max_r() - 1.0));
        c.note("sup|r-1|", dev);
        c.note("kind", to_string(o.kind));
        c.require(dev <= 1e-6, "orbit radius within 1e-6 of 1");
        c.require(o.kind == OrbitKind::black_horizon, "classified black-horizon");
    }
    const auto erg = locate_ergosphere(m, uniform_theta_grid(64));
    double dev = 0.0;
    for (double r : erg.r) dev = std::max(dev, std::abs(r - std::sqrt(2.0)));
    c.note("sup|r_e-sqrt2|", dev);
    c.require(dev <= 1e-9, "ergosphere at sqrt(2) within 1e-9");
}

void dn_equality(Checks& c) {
    const double a = 5.0;
    const auto f = gaussian_pulse(0.0, 0.5);
    const std::vector<int> grids{100, 200, 400};
    const auto flat = refinement_study(
        minkowski_radial(), f, a, grids,
        [&](const std::vector<double>& x) {
            std::vector<double> v;
            for (double t : x) v.push_back(f.df(t));
            return v;
        },
        {}, 3);
    const double min_order = *std::min_element(flat.orders.begin(), flat.orders.end());
    c.note("flat_errors", std::to_string(flat.errors[0]) + "," + std::to_string(flat.errors[1]) + "," +
                              std::to_string(flat.errors[2]));
    c.note("min_order", min_order);
    c.require(min_order >= 1.5, "flat DN error converges at order >= 1.5");
    const auto m = acoustic(-1.0);
    const auto sink = refinement_study(
        m, f, a, grids, [&](const std::vector<double>& x) { return dn_characteristic(m, f, a, x).lambda_f; }, {}, 3);
    c.note("sink_diffs", std::to_string(sink.errors[0]) + "," + std::to_string(sink.errors[1]) + "," +
                             std::to_string(sink.errors[2]));
    c.require(sink.monotone(), "direct vs characteristic difference decreases on the three grids");
}

void invariants(Checks& c) {
    const auto m = acoustic_to_radial(ramp());
    const Window w{-10, 10, 0.05, 10};
    const auto val = validate(m, w);
    c.require(val.passed() && val.observed_c0_q > 0.0, "hyperbolicity q > 0 (metric validation)");

    std::size_t order_violations = 0;
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j) {
            const auto roots = radial_char_roots(m, -10 + 0.2 * i, 0.05 + 0.1 * j);
            order_violations += !(roots.s_minus < roots.s_plus);
        }
    c.note("root_order_violations", order_violations);
    c.require(order_violations == 0, "s- < s+ on the grid");

    RadialOptions o;
    for (int i = 0; i <= 40; ++i) o.sample_times.push_back(-2.0 + 0.1 * i);
    std::vector<double> r0;
    for (int k = 0; k < 24; ++k) r0.push_back(0.3 + 0.16 * k);
    std::vector<Trajectory> runs;
    for (double r : r0) runs.push_back(integrate_radial(m, Family::plus, r, -2.0, Direction::forward, -2, 2, o));
    std::size_t crossings = 0;
    for (std::size_t k = 1; k < runs.size(); ++k) {
        const std::size_t n = std::min(runs[k - 1].x0.size(), runs[k].x0.size());
        for (std::size_t i = 0; i < n; ++i)
            if (runs[k - 1].x0[i] == runs[k].x0[i] && !(runs[k - 1].r[i] < runs[k].r[i] + 1e-9)) ++crossings;
    }
    c.note("crossings", crossings);
    c.require(crossings == 0, "same-family trajectories never cross");

    const auto bump = radial_bump_metric(-1.0, 2.0, 2.5, 0.3);
    ShootOptions so;
    so.n_samples = 21;
    const auto inner = inner_separatrix(bump, HorizonKind::inner_black, -2, 2, so);
    const auto outer = separatrix_shoot(bump, HorizonKind::outer_black, -2, 2, so);
    const auto inner_ramp = inner_separatrix(m, HorizonKind::inner_black, -2, 2, so);
    const auto outer_ramp = separatrix_shoot(m, HorizonKind::outer_black, -2, 2, so);
    bool nested = true;
    for (std::size_t i = 0; i < inner.r.size(); ++i) nested = nested && inner.r[i] <= outer.r[i] + so.tol;
    for (std::size_t i = 0; i < inner_ramp.r.size(); ++i)
        nested = nested && inner_ramp.r[i] <= outer_ramp.r[i] + 10 * so.tol;
    c.note("bump_R_inner", inner.r.front());
    c.note("bump_R_outer", outer.r.front());
    c.require(nested, "inner horizon R_+ <= outer horizon R^+");

    std::size_t pairs = 0, violations = 0;
    AcousticFlow swirl{ramp(), [](double, double, double) { return 1.0; }};
    int seed = 1;
    for (double x1 : {0.3, 1.0, 2.5, 6.0}) {
        const auto rep = cone_pairing_check(swirl.inverse_metric_cartesian(0.5, x1, 0.2), 1000, seed++);
        pairs += rep.n_pairs;
        violations += rep.violations;
    }
    c.note("cone_pairs", pairs);
    c.note("cone_violations", violations);
    c.require(violations == 0, "cone pairing positivity over 1000 seeded vectors and covectors");

    double defect = 0.0;
    for (const RadialMetric& g : {minkowski_radial(), acoustic(-1.0)})
        defect = std::max(defect, build_char_coords(g, 5.0).boundary_identity_defect);
    c.note("boundary_identity_defect", defect);
    c.require(defect <= 8 * std::numeric_limits<double>::epsilon() * 5.0, "boundary identity to machine precision");
}

void containment_check(Checks& c) {
    ShootOptions o;
    o.n_samples = 200;
    const auto dec = acoustic_to_radial(ramp());
    const auto rd = containment(separatrix_shoot(dec, HorizonKind::outer_black, -20, 20, o), dec, 1e-8);
    const auto inc = acoustic_to_radial(TimeProfile::tanh_ramp(-2.0, -0.5));
    const auto ri = containment(separatrix_shoot(inc, HorizonKind::outer_black, -20, 20, o), inc, 1e-8);
    c.note("decreasing", to_string(rd.observed));
    c.note("increasing", to_string(ri.observed));
    c.require(rd.samples == 200 && ri.samples == 200, "200 sample times");
    c.require(rd.observed == Containment::event_inside_dynamic, "|A| decreasing: R+ <= |A| at every sample");
    c.require(ri.observed == Containment::dynamic_inside_event, "|A| increasing: |A| <= R+ at every sample");
}

struct Criterion {
    int id;
    std::string title;
    double limit_seconds;  ///< 0: no runtime bound
    std::function<void(Checks&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "constant-flow black hole", 5.0, constant_black_hole},
        {2, "event-horizon limits and Picard agreement", 30.0, ramp_limits},
        {3, "white-hole mirror", 0.0, white_hole_mirror},
        {4, "appearance and disappearance times", 0.0, appearance},
        {5, "near-origin census", 20.0, origin_census_check},
        {6, "closed orbit and ergosphere", 0.0, closed_orbit},
        {7, "DN equality under refinement", 60.0, dn_equality},
        {8, "invariant suites", 0.0, invariants},
        {9, "apparent/dynamic horizon containment", 0.0, containment_check},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Checks c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            cr.run(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.notes << " [exception: " << e.what() << "]";
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (cr.limit_seconds > 0.0) c.require(s < cr.limit_seconds, "runtime limit");
        char timing[64];
        if (cr.limit_seconds > 0.0) std::snprintf(timing, sizeof timing, "%.2f s < %.0f s", s, cr.limit_seconds);
        else std::snprintf(timing, sizeof timing, "%.2f s", s);
        std::printf("criterion %d %s  %s (%s):%s\n", cr.id, c.ok ? "PASS" : "FAIL", cr.title.c_str(), timing,
                    c.notes.str().c_str());
        std::fflush(stdout);
        failed += !c.ok;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
