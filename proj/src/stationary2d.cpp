#include "horizonlab/stationary2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "horizonlab/error.hpp"
#include "horizonlab/parallel.hpp"

namespace horizonlab {

namespace {

double coefficient_scale(const PolarMetric2D& m) {
    double s = 1.0;
    for (int i = 0; i < 64; ++i) {
        const double th = 2.0 * M_PI * i / 64;
        s = std::max({s, std::abs(m.b1(th)), std::abs(m.b2(th))});
    }
    return s;
}

double delta_dr(const PolarSample& s) {
    const auto& c = s.value;
    const auto& d = s.d_r;
    return d.grr * c.gtt + c.grr * d.gtt - 2.0 * c.grt * d.grt;
}

double delta_dtheta(const PolarSample& s) {
    const auto& c = s.value;
    const auto& d = s.d_theta;
    return d.grr * c.gtt + c.grr * d.gtt - 2.0 * c.grt * d.grt;
}

// The family with the smaller |dr/dx0|: continuous through an orbit even
// where the plus/minus labels swap.
Family slow_family(const PolarMetric2D& m, double r, double theta) {
    const double a = std::abs(polar_radial_speed(m, Family::plus, r, theta));
    const double b = std::abs(polar_radial_speed(m, Family::minus, r, theta));
    return a <= b ? Family::plus : Family::minus;
}

Family other(Family f) { return f == Family::plus ? Family::minus : Family::plus; }

}  // namespace

std::vector<double> uniform_theta_grid(int n) {
    if (n < 1) throw PreconditionError("theta grid needs at least one point");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = 2.0 * M_PI * i / n;
    return g;
}

Ergosphere locate_ergosphere(const PolarMetric2D& metric, const std::vector<double>& theta_grid,
                             const ErgosphereOptions& o) {
    if (theta_grid.empty()) throw PreconditionError("empty theta grid");
    const double r_max = o.r_max > 0.0 ? o.r_max : 1e3 * coefficient_scale(metric);
    if (!(o.r_min > 0.0 && o.r_min < r_max) || o.n_scan < 2) throw PreconditionError("invalid ergosphere scan");
    Ergosphere e;
    for (double th : theta_grid) {
        auto D = [&](double r) { return metric.delta(r, th); };
        double a = o.r_min;
        double da = D(a);
        if (!(da < 0.0)) {
            std::ostringstream os;
            os << "Delta >= 0 at r = " << a << " on the ray theta = " << th << "; no ergoregion there";
            throw PartialErgosphereError(os.str(), th);
        }
        std::optional<double> hi;
        for (int k = 1; k < o.n_scan; ++k) {
            const double b = o.r_min * std::pow(r_max / o.r_min, static_cast<double>(k) / (o.n_scan - 1));
            if (D(b) >= 0.0) {
                hi = b;
                break;
            }
            a = b;
        }
        if (!hi) {
            std::ostringstream os;
            os << "Delta has no sign change on the ray theta = " << th << " up to r = " << r_max;
            throw PartialErgosphereError(os.str(), th);
        }
        double b = *hi;
        while (b - a > o.root_tol * std::max(1.0, b)) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            (D(m) < 0.0 ? a : b) = m;
        }
        const double root = 0.5 * (a + b);
        e.theta.push_back(th);
        e.r.push_back(root);
        e.max_root_residual = std::max(e.max_root_residual, std::abs(D(root)));

        // Non-characteristic: the spatial normal (dDelta/dr, dDelta/dtheta / r)
        // is not null for the degenerate spatial metric on the curve.
        const PolarSample s = metric.sample(root, th);
        const double nr = delta_dr(s), nt = delta_dtheta(s) / root;
        const auto& c = s.value;
        const double q = c.grr * nr * nr + 2.0 * c.grt * nr * nt + c.gtt * nt * nt;
        const double scale = (std::abs(c.grr) + 2.0 * std::abs(c.grt) + std::abs(c.gtt)) * (nr * nr + nt * nt);
        if (!(scale > 0.0) || std::abs(q) <= 1e-8 * scale) e.characteristic_theta.push_back(th);
    }
    return e;
}

std::string to_string(OrbitKind k) { return k == OrbitKind::black_horizon ? "black-horizon" : "white-horizon"; }

double ClosedOrbit::min_r() const { return r.empty() ? section_r : *std::min_element(r.begin(), r.end()); }
double ClosedOrbit::max_r() const { return r.empty() ? section_r : *std::max_element(r.begin(), r.end()); }

namespace {

struct Candidate {
    bool found = false;
    bool degenerate = false;
    Family family = Family::plus;
    double r = 0.0;
    Direction direction = Direction::backward;
    std::string diagnostic;
};

struct ReturnMap {
    const PolarMetric2D& metric;
    double section;
    Direction direction;
    PolarOptions polar;
    double max_arc;

    // First return to the section from (r, section) along the slow family.
    std::optional<PolarRun> run(double r, bool record) const {
        PolarOptions p = polar;
        p.section_theta = section;
        p.max_crossings = 1;
        p.record = record;
        const Family f = slow_family(metric, r, section);
        const PolarState s = initial_polar_state(metric, f, 0.0, r, section, direction);
        PolarRun out = integrate_polar2d(metric, s, f, direction, max_arc, p);
        if (out.crossings.empty()) return std::nullopt;
        return out;
    }
    std::optional<double> operator()(double r) const {
        auto o = run(r, false);
        if (!o) return std::nullopt;
        return o->crossings.front().r;
    }
};

Candidate probe_seed(const PolarMetric2D& metric, Family family, double r0, double th0, Direction dir,
                     double max_arc, const OrbitSearchOptions& o) {
    Candidate c;
    c.direction = dir;
    c.family = family;
    PolarOptions p = o.polar;
    p.section_theta = o.section_theta;
    p.max_crossings = o.max_returns;
    p.record = false;
    PolarRun run;
    try {
        run = integrate_polar2d(metric, initial_polar_state(metric, family, 0.0, r0, th0, dir), family, dir, max_arc, p);
    } catch (const NumericalError& e) {
        c.diagnostic = e.what();
        return c;
    }
    const auto& cr = run.crossings;
    if (cr.size() >= 4) {
        const std::size_t n = cr.size();
        const double d1 = std::abs(cr[n - 1].r - cr[n - 2].r);
        const double d2 = std::abs(cr[n - 2].r - cr[n - 3].r);
        const double d3 = std::abs(cr[n - 3].r - cr[n - 4].r);
        // Cauchy test on the last three returns; below the integration floor the
        // differences are noise and need not keep shrinking.
        if (std::max({d1, d2, d3}) < o.convergence_tol) {
            c.found = true;
            c.r = cr.back().r;
            return c;
        }
    }
    const auto& tr = run.trajectory;
    if (cr.size() < 2 && (tr.fate == Fate::alive_at_window_end || tr.fate == Fate::reached_ergosphere)) {
        // Purely radial flow: the run settles on a circle of fixed points, which
        // may coincide with the ergosphere.
        const double th = std::remainder(tr.theta.back(), 2.0 * M_PI);
        const double v = polar_radial_speed(metric, slow_family(metric, tr.r_end, th), tr.r_end, th);
        if (std::abs(v) < o.convergence_tol) {
            c.found = true;
            c.degenerate = true;
            c.r = tr.r_end;
            return c;
        }
    }
    std::ostringstream os;
    os << "seed r0 = " << r0 << ", theta0 = " << th0 << ", " << to_string(dir) << ": " << to_string(tr.fate)
       << " after " << cr.size() << " section returns";
    c.diagnostic = os.str();
    return c;
}

// Radius on the ray where grr vanishes.  With grt = 0 the xi0 = 0 null
// covectors there are purely radial and dr/dx0 = grr / gr0 = 0, so this is the
// circle of fixed points of a purely radial flow.
double radial_fixed_point(const PolarMetric2D& m, double theta, double r_guess, double tol) {
    auto v = [&](double r) { return m.at(r, theta).grr; };
    double w = 1e-3 * std::max(1.0, r_guess);
    double a = r_guess - w, b = r_guess + w;
    for (int k = 0; k < 40 && (v(a) < 0.0) == (v(b) < 0.0); ++k) {
        w *= 2.0;
        a = std::max(0.5 * a, r_guess - w);
        b = r_guess + w;
    }
    double va = v(a);
    if ((va < 0.0) == (v(b) < 0.0)) throw NumericalError("radial fixed point of the degenerate orbit not bracketed");
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double vm = v(mid);
        if ((vm < 0.0) == (va < 0.0)) {
            a = mid;
            va = vm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

ClosedOrbit refine_degenerate(const PolarMetric2D& m, const Candidate& c, const OrbitSearchOptions& o) {
    ClosedOrbit orb;
    orb.degenerate = true;
    orb.period = std::numeric_limits<double>::infinity();
    orb.attracting = c.direction;
    orb.kind = c.direction == Direction::backward ? OrbitKind::black_horizon : OrbitKind::white_horizon;
    orb.section_r = radial_fixed_point(m, o.section_theta, c.r, 1e-13);
    orb.family = c.family;
    for (double th : uniform_theta_grid(64)) {
        orb.theta.push_back(th);
        orb.r.push_back(radial_fixed_point(m, th, orb.section_r, 1e-13));
        orb.x0.push_back(0.0);
    }
    orb.closure_defect = std::abs(orb.r.front() - orb.section_r);
    // Return map of the radial flow is r -> r; record the radial attraction rate instead.
    const double h = 1e-6 * std::max(1.0, orb.section_r);
    auto speed = [&](double r) {
        const auto g = m.at(r, o.section_theta);
        return g.grr / g.gr0;
    };
    orb.return_map_derivative = (speed(orb.section_r + h) - speed(orb.section_r - h)) / (2.0 * h);
    return orb;
}

ClosedOrbit refine_orbit(const PolarMetric2D& m, const Candidate& c, double max_arc, const OrbitSearchOptions& o) {
    const ReturnMap P{m, o.section_theta, c.direction, o.polar, max_arc};
    double r = c.r;
    double F = std::numeric_limits<double>::infinity(), dF = -1.0;
    for (int it = 0; it < o.newton_max_iter; ++it) {
        const auto p0 = P(r);
        if (!p0) throw NumericalError("return map lost the section during Newton refinement");
        F = *p0 - r;
        const double h = std::max(1e-7 * std::max(1.0, r), 10.0 * std::abs(F));
        const auto pp = P(r + h), pm = P(r - h);
        if (!pp || !pm) throw NumericalError("return map lost the section during Newton refinement");
        dF = (*pp - *pm) / (2.0 * h) - 1.0;
        if (std::abs(F) < o.newton_tol) break;
        const double step = F / dF;
        r -= step;
        if (std::abs(step) < o.newton_tol) {
            const auto p1 = P(r);
            if (p1) F = *p1 - r;
            break;
        }
    }
    const auto rev = P.run(r, true);
    if (!rev) throw NumericalError("refined orbit does not return to the section");

    ClosedOrbit orb;
    orb.section_r = r;
    orb.family = slow_family(m, r, o.section_theta);
    orb.attracting = c.direction;
    orb.return_map_derivative = dF + 1.0;
    orb.closure_defect = std::abs(rev->crossings.front().r - r);
    orb.period = std::abs(rev->crossings.front().x0);
    const auto& tr = rev->trajectory;
    const double sgn = c.direction == Direction::forward ? 1.0 : -1.0;
    for (std::size_t i = 0; i < tr.x0.size(); ++i) {
        // Stored with x0 increasing from the section point.
        orb.x0.push_back(sgn * tr.x0[i]);
        orb.r.push_back(tr.r[i]);
        orb.theta.push_back(std::remainder(tr.theta[i], 2.0 * M_PI));
    }

    // The other family crosses the orbit; inward as x0 increases means black.
    const std::size_t n = orb.r.size();
    const int votes = std::max(1, o.n_votes);
    for (int k = 0; k < votes; ++k) {
        const std::size_t i = static_cast<std::size_t>(k) * (n - 1) / static_cast<std::size_t>(votes);
        const Family slow = slow_family(m, orb.r[i], orb.theta[i]);
        const double v = polar_radial_speed(m, other(slow), orb.r[i], orb.theta[i]);
        (v < 0.0 ? orb.votes_black : orb.votes_white) += 1;
    }
    if (orb.votes_black == orb.votes_white) {
        std::ostringstream os;
        os << "transverse-family vote tied at r = " << r << " (" << orb.votes_black << " black, " << orb.votes_white
           << " white)";
        throw OrbitClassificationError(os.str());
    }
    orb.kind = orb.votes_black > orb.votes_white ? OrbitKind::black_horizon : OrbitKind::white_horizon;
    return orb;
}

}  // namespace

OrbitSearchReport find_closed_orbits(const PolarMetric2D& metric, Family family, int n_seeds, std::uint64_t seed,
                                     double max_arc, const OrbitSearchOptions& o) {
    if (n_seeds < 1) throw PreconditionError("need at least one seed");
    if (!(max_arc > 0.0)) throw PreconditionError("max_arc must be positive");
    {
        const auto grid = uniform_theta_grid(64);
        const double s0 = metric.b1(grid.front());
        for (double th : grid)
            if (!(metric.b1(th) * s0 > 0.0)) throw PreconditionError("b1 must have one sign");
    }
    const Ergosphere erg = locate_ergosphere(metric, uniform_theta_grid(64));
    const double r_e_min = *std::min_element(erg.r.begin(), erg.r.end());
    const double eps = o.epsilon > 0.0 ? o.epsilon : 0.05 * r_e_min;
    if (!(eps < r_e_min)) throw PreconditionError("seed annulus is empty");

    struct Seed {
        double r, theta;
        Direction dir;
    };
    std::vector<Seed> seeds;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n_seeds; ++i) {
        const double th = 2.0 * M_PI * unit(rng);
        const double u = unit(rng);
        // Stay a hair inside the ergosphere on this ray.
        const double r_e = locate_ergosphere(metric, {th}).r.front();
        const double r = eps + u * (r_e * (1.0 - 1e-3) - eps);
        seeds.push_back({r, th, Direction::backward});
        seeds.push_back({r, th, Direction::forward});
    }
    std::vector<Candidate> cand(seeds.size());
    parallel_for(seeds.size(), o.threads, [&](std::size_t i) {
        cand[i] = probe_seed(metric, family, seeds[i].r, seeds[i].theta, seeds[i].dir, max_arc, o);
    });

    OrbitSearchReport rep;
    rep.seeds = n_seeds;
    rep.dedup_tol = o.dedup_tol;
    std::vector<Candidate> unique;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        const auto& c = cand[i];
        if (!c.found) {
            rep.diagnostics.push_back(c.diagnostic);
            continue;
        }
        if (i % 2 == 0 || !cand[i - 1].found) ++rep.converged_seeds;
        const bool dup = std::any_of(unique.begin(), unique.end(), [&](const Candidate& u) {
            return u.degenerate == c.degenerate && u.direction == c.direction && std::abs(u.r - c.r) < 1e-4;
        });
        if (!dup) unique.push_back(c);
    }
    for (const auto& c : unique) {
        ClosedOrbit orb = c.degenerate ? refine_degenerate(metric, c, o) : refine_orbit(metric, c, max_arc, o);
        const bool dup = std::any_of(rep.orbits.begin(), rep.orbits.end(), [&](const ClosedOrbit& q) {
            return std::abs(q.section_r - orb.section_r) < o.dedup_tol;
        });
        if (!dup) rep.orbits.push_back(std::move(orb));
    }
    std::sort(rep.orbits.begin(), rep.orbits.end(),
              [](const ClosedOrbit& a, const ClosedOrbit& b) { return a.section_r < b.section_r; });
    if (rep.orbits.empty())
        rep.diagnostics.push_back("no seed converged; this is not evidence that no closed orbit exists");
    return rep;
}

bool orbit_nesting_consistent(const std::vector<ClosedOrbit>& orbits, double tol) {
    for (const auto& plus : orbits) {
        if (plus.family != Family::plus) continue;
        for (const auto& minus : orbits) {
            if (minus.family != Family::minus) continue;
            if (plus.min_r() < minus.max_r() - tol) return false;
        }
    }
    return true;
}

double default_census_epsilon(const PolarMetric2D& metric) {
    double min_b1 = std::numeric_limits<double>::infinity(), scale = 1.0;
    for (double th : uniform_theta_grid(64)) {
        min_b1 = std::min(min_b1, std::abs(metric.b1(th)));
        scale = std::max({scale, std::abs(metric.b1(th)), std::abs(metric.b2(th))});
    }
    return 0.05 * min_b1 / scale;
}

OriginCensusReport origin_census(const PolarMetric2D& metric, double epsilon, int n_samples, std::uint64_t seed,
                                 double max_arc, const PolarOptions& options, unsigned threads) {
    if (n_samples < 1) throw PreconditionError("census needs at least one sample");
    const auto grid = uniform_theta_grid(64);
    const double s0 = metric.b1(grid.front());
    double min_b1 = std::numeric_limits<double>::infinity();
    for (double th : grid) {
        if (!(metric.b1(th) * s0 > 0.0)) throw PreconditionError("b1 must have one sign");
        min_b1 = std::min(min_b1, std::abs(metric.b1(th)));
    }
    OriginCensusReport rep;
    rep.epsilon = epsilon > 0.0 ? epsilon : default_census_epsilon(metric);
    rep.direction = s0 < 0.0 ? Direction::forward : Direction::backward;
    const Ergosphere erg = locate_ergosphere(metric, grid);
    const double r_e_min = *std::min_element(erg.r.begin(), erg.r.end());
    rep.in_hypothesis = rep.epsilon <= 0.1 * min_b1 && rep.epsilon < 0.5 * r_e_min;
    if (!(rep.epsilon < r_e_min)) throw PreconditionError("epsilon must lie inside the ergosphere");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 2.0 * M_PI);
    std::vector<double> thetas(static_cast<std::size_t>(n_samples));
    for (auto& t : thetas) t = unit(rng);
    rep.runs.resize(2 * thetas.size());
    PolarOptions p = options;
    p.record = false;
    parallel_for(rep.runs.size(), threads, [&](std::size_t i) {
        const double th = thetas[i / 2];
        const Family f = i % 2 == 0 ? Family::plus : Family::minus;
        CensusRun run{th, f, Fate::alive_at_window_end, 0.0, rep.epsilon, {}};
        try {
            const auto init = initial_polar_state(metric, f, 0.0, rep.epsilon, th, rep.direction);
            const auto out = integrate_polar2d(metric, init, f, rep.direction, max_arc, p);
            run.fate = out.trajectory.fate;
            run.x0_end = out.trajectory.x0_end;
            run.r_end = out.trajectory.r_end;
        } catch (const NumericalError& e) {
            run.detail = e.what();
        }
        rep.runs[i] = run;
    });
    for (const auto& r : rep.runs)
        if (r.fate != Fate::hit_origin) rep.violators.push_back(r);
    return rep;
}

}  // namespace horizonlab
