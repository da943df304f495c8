#include "horizonlab/waves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "horizonlab/characteristics.hpp"
#include "horizonlab/error.hpp"
#include "horizonlab/ode.hpp"
#include "horizonlab/parallel.hpp"

namespace horizonlab {

BoundaryData gaussian_pulse(double center, double sigma, double amplitude, double cut) {
    if (!(sigma > 0.0) || !(cut > 0.0 && cut < 1.0)) throw PreconditionError("invalid Gaussian pulse");
    const double zmax = std::sqrt(-2.0 * std::log(cut));
    BoundaryData d;
    d.support_lo = center - zmax * sigma;
    d.support_hi = center + zmax * sigma;
    d.f = [=](double x) {
        const double z = (x - center) / sigma;
        if (std::abs(z) >= zmax) return 0.0;
        return amplitude * (std::exp(-0.5 * z * z) - cut);
    };
    d.df = [=](double x) {
        const double z = (x - center) / sigma;
        if (std::abs(z) >= zmax) return 0.0;
        return -amplitude * z / sigma * std::exp(-0.5 * z * z);
    };
    std::ostringstream os;
    os << "gaussian(center=" << center << ", sigma=" << sigma << ")";
    d.label = os.str();
    return d;
}

BoundaryData combine(const BoundaryData& f, double alpha, const BoundaryData& g, double beta) {
    BoundaryData d;
    d.f = [=](double x) { return alpha * f.f(x) + beta * g.f(x); };
    d.df = [=](double x) { return alpha * f.df(x) + beta * g.df(x); };
    d.support_lo = std::min(f.support_lo, g.support_lo);
    d.support_hi = std::max(f.support_hi, g.support_hi);
    d.label = "combination";
    return d;
}

BoundaryData shifted(const BoundaryData& f, double shift) {
    BoundaryData d;
    d.f = [=](double x) { return f.f(x - shift); };
    d.df = [=](double x) { return f.df(x - shift); };
    d.support_lo = f.support_lo + shift;
    d.support_hi = f.support_hi + shift;
    d.label = f.label + " shifted";
    return d;
}

// ---------------------------------------------------------------------------

namespace {

struct CharEnd {
    double t;      // x0 at which r = a is reached
    double J;      // dR(t)/dr0
    double v_end;  // speed at (t, a)
    bool reached;
};

// Follows dr/dx0 = c(x0, r) from (x0, r) in `dir` until r = a, carrying the
// variational equation dJ/dx0 = (dc/dr) J.
CharEnd follow(const RadialMetric& m, bool plus, double a, double x0, double r, double dir, const CharOptions& o) {
    auto speed = [&](double t, double rr) {
        const CharSpeeds s = char_speeds(m, t, rr);
        return plus ? s.c_plus : s.c_minus;
    };
    if (r == a) return {x0, 1.0, speed(x0, a), true};
    const double T = o.max_time > 0.0 ? o.max_time : 200.0 * m.length_scale();
    auto rhs = [&](double t, const ode::State<2>& y) -> ode::State<2> {
        const double rr = y[0];
        if (!(rr > 0.0)) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
        const double h = 1e-6 * std::max(1.0, rr);
        const double dc = (speed(t, rr + h) - speed(t, rr - h)) / (2.0 * h);
        return {speed(t, rr), dc * y[1]};
    };
    ode::Options opt;
    opt.atol = o.atol;
    opt.rtol = o.rtol;
    opt.record = false;
    std::vector<ode::Event<2>> ev(1);
    ev[0].g = [a](double, const ode::State<2>& y) { return y[0] - a; };
    ev[0].direction = 1;
    ev[0].terminal = true;
    const auto res = ode::integrate<2>(rhs, x0, ode::State<2>{r, 1.0}, x0 + dir * T, opt, ev);
    if (res.terminal_event != 0) return {res.t_final, res.y_final[1], 0.0, false};
    // Land exactly on r = a: the event root is resolved far below tolerance.
    return {res.t_final, res.y_final[1], speed(res.t_final, a), true};
}

}  // namespace

CharPoint char_point(const RadialMetric& metric, double a, double x0, double r, const CharOptions& o) {
    if (!(r > 0.0 && r <= a)) throw PreconditionError("char_point needs 0 < r <= a");
    CharPoint p;
    const CharSpeeds s0 = char_speeds(metric, x0, r);
    if (r == a) {
        p.phi1 = x0 + a;
        p.phi2 = -x0 + a;
        p.phi1_x0 = 1.0;
        p.phi1_r = -1.0 / s0.c_minus;
        p.phi2_x0 = -1.0;
        p.phi2_r = 1.0 / s0.c_plus;
        p.valid = std::isfinite(p.phi1_r) && std::isfinite(p.phi2_r);
        return p;
    }
    // phi1: the inward family traced back in x0 to r = a.
    const CharEnd e1 = follow(metric, false, a, x0, r, -1.0, o);
    // phi2: the outward family traced forward in x0 to r = a.
    const CharEnd e2 = follow(metric, true, a, x0, r, 1.0, o);
    if (!e1.reached || !e2.reached || e1.v_end == 0.0 || e2.v_end == 0.0) return p;
    p.phi1 = e1.t + a;
    p.phi1_x0 = s0.c_minus * e1.J / e1.v_end;
    p.phi1_r = -e1.J / e1.v_end;
    p.phi2 = -e2.t + a;
    p.phi2_x0 = -s0.c_plus * e2.J / e2.v_end;
    p.phi2_r = e2.J / e2.v_end;
    p.valid = true;
    return p;
}

std::optional<double> trapped_radius(const RadialMetric& metric, double x0, double a) {
    constexpr int n = 400;
    const double r0 = 1e-4 * a;
    auto trapped = [&](double r) { return char_speeds(metric, x0, r).c_plus <= 0.0; };
    if (!trapped(r0)) return std::nullopt;
    double lo = r0, hi = a;
    for (int k = 1; k <= n; ++k) {
        const double r = r0 * std::pow(a / r0, static_cast<double>(k) / n);
        if (!trapped(r)) {
            hi = r;
            break;
        }
        lo = r;
    }
    if (hi == a && trapped(a)) return a;
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (trapped(mid) ? lo : hi) = mid;
    }
    return lo;
}

double g_s_tau(const RadialMetric& metric, double x0, double r, const CharPoint& p) {
    const RadialComponents g = metric.at(x0, r);
    return g.g00 * p.phi1_x0 * p.phi2_x0 + g.gr0 * (p.phi1_x0 * p.phi2_r + p.phi1_r * p.phi2_x0) +
           g.grr * p.phi1_r * p.phi2_r;
}

CharCoordinates build_char_coords(const RadialMetric& metric, double a, const CharMeshOptions& o) {
    if (!(a > 0.0) || o.n_x0 < 1 || o.n_r < 2 || !(o.x0_min <= o.x0_max))
        throw PreconditionError("invalid characteristic mesh");
    CharCoordinates c;
    c.a = a;
    double trapped_max = 0.0;
    bool any_trapped = false;
    for (int i = 0; i < o.n_x0; ++i) {
        const double x = o.n_x0 == 1 ? o.x0_min : o.x0_min + (o.x0_max - o.x0_min) * i / (o.n_x0 - 1);
        c.x0.push_back(x);
        const auto rt = trapped_radius(metric, x, a);
        if (rt) {
            any_trapped = true;
            trapped_max = std::max(trapped_max, *rt);
        }
        const CharSpeeds s = char_speeds(metric, x, a);
        if (!(s.c_minus < 0.0 && s.c_plus > 0.0)) {
            std::ostringstream os;
            os << "the cylinder r = " << a << " is not outside the horizon at x0 = " << x;
            throw ConfigurationError(os.str());
        }
    }
    const double r_min = o.r_min > 0.0 ? o.r_min : any_trapped ? trapped_max + 0.25 * (a - trapped_max) : 0.5 * a;
    if (!(r_min < a)) throw PreconditionError("mesh needs r_min < a");
    for (int j = 0; j < o.n_r; ++j) c.r.push_back(r_min + (a - r_min) * j / (o.n_r - 1));
    c.r.back() = a;

    c.points.resize(c.x0.size() * c.r.size());
    for (std::size_t i = 0; i < c.x0.size(); ++i)
        for (std::size_t j = 0; j < c.r.size(); ++j) c.points[i * c.r.size() + j] = char_point(metric, a, c.x0[i], c.r[j], o.characteristics);

    c.jacobian_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.x0.size(); ++i) {
        for (std::size_t j = 0; j < c.r.size(); ++j) {
            const CharPoint& p = c.at(i, j);
            if (!p.valid) {
                ++c.clipped;
                continue;
            }
            const RadialComponents g = metric.at(c.x0[i], c.r[j]);
            const double gs = std::abs(g.g00) + 2.0 * std::abs(g.gr0) + std::abs(g.grr);
            auto nullity = [&](double px, double pr) {
                const double v = g.g00 * px * px + 2.0 * g.gr0 * px * pr + g.grr * pr * pr;
                return std::abs(v) / (gs * (px * px + pr * pr));
            };
            c.max_nullity_residual =
                std::max({c.max_nullity_residual, nullity(p.phi1_x0, p.phi1_r), nullity(p.phi2_x0, p.phi2_r)});
            c.jacobian_min = std::min(c.jacobian_min, std::abs(p.jacobian()));
        }
        const CharPoint& b = c.at(i, c.r.size() - 1);
        c.boundary_identity_defect =
            std::max({c.boundary_identity_defect, std::abs(b.y0() - c.x0[i]), std::abs(b.y1() - a)});
    }
    if (c.jacobian_min < o.jacobian_threshold) {
        std::ostringstream os;
        os << "characteristic coordinate Jacobian " << c.jacobian_min << " below " << o.jacobian_threshold;
        throw DegenerateCoordinatesError(os.str());
    }
    return c;
}

std::vector<double> dalembert_solve(const CharCoordinates& c, const BoundaryData& f) {
    std::vector<double> u(c.points.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < c.points.size(); ++k) {
        const CharPoint& p = c.points[k];
        if (p.valid) u[k] = f.f(p.y0() + p.y1() - c.a);
    }
    return u;
}

double dalembert_dn(const BoundaryData& f, double y0) { return f.df(y0); }

std::string to_string(DNMethod m) { return m == DNMethod::direct_fd ? "direct-fd" : "characteristic"; }

// ---------------------------------------------------------------------------
// Finite-volume solver for U = (psi, pi), psi = u_r, pi = w (g00 u_0 + gr0 u_r):
//   d/dx0 U + d/dr (A U) = 0,  A = [[gr0/g00, -1/(w g00)], [-w q/g00, gr0/g00]],
// with eigenvalues c_-, c_+.

namespace {

using Vec2 = std::array<double, 2>;

struct FluxMatrices {
    Eigen::Matrix2d A, Aplus, Aminus;
    double c_minus, c_plus, w;
    RadialComponents g;
};

FluxMatrices flux_matrices(const RadialMetric& m, double x0, double r, int k) {
    FluxMatrices F;
    F.g = m.at(x0, r);
    const CharSpeeds s = char_speeds(F.g, x0, r);
    const double q = F.g.q();
    const double sq = std::sqrt(q);
    F.w = std::pow(r, k) / sq;
    F.c_minus = s.c_minus;
    F.c_plus = s.c_plus;
    F.A << F.g.gr0 / F.g.g00, -1.0 / (F.w * F.g.g00), -std::pow(r, k) * sq / F.g.g00, F.g.gr0 / F.g.g00;
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d P1 = (F.A - s.c_plus * I) / (s.c_minus - s.c_plus);
    const Eigen::Matrix2d P2 = (F.A - s.c_minus * I) / (s.c_plus - s.c_minus);
    F.Aplus = std::max(s.c_minus, 0.0) * P1 + std::max(s.c_plus, 0.0) * P2;
    F.Aminus = std::min(s.c_minus, 0.0) * P1 + std::min(s.c_plus, 0.0) * P2;
    return F;
}

double limit(Limiter lim, double dl, double dr) {
    switch (lim) {
        case Limiter::none: return 0.5 * (dl + dr);
        case Limiter::minmod:
            if (dl * dr <= 0.0) return 0.0;
            return std::abs(dl) < std::abs(dr) ? dl : dr;
        case Limiter::mc: {
            if (dl * dr <= 0.0) return 0.0;
            const double s = dl > 0.0 ? 1.0 : -1.0;
            return s * std::min({2.0 * std::abs(dl), 2.0 * std::abs(dr), 0.5 * std::abs(dl + dr)});
        }
    }
    return 0.0;
}

struct Solver {
    const RadialMetric& m;
    const BoundaryData& f;
    double a, r_in, h;
    int k;
    Limiter lim;
    int n;

    double face(int i) const { return i == n ? a : r_in + h * i; }

    // Boundary state at r = a: outgoing characteristic from the interior, u_0 = f'.
    Vec2 boundary_state(double t, const std::vector<Vec2>& U) const {
        const FluxMatrices F = flux_matrices(m, t, a, k);
        Eigen::Vector2d ue;
        for (int c = 0; c < 2; ++c) ue[c] = 1.5 * U[n - 1][c] - 0.5 * U[n - 2][c];
        const Eigen::Matrix2d P2 = (F.A - F.c_minus * Eigen::Matrix2d::Identity()) / (F.c_plus - F.c_minus);
        const Eigen::RowVector2d l2 = P2.row(0).norm() >= P2.row(1).norm() ? P2.row(0) : P2.row(1);
        Eigen::Matrix2d M;
        M.row(0) = l2;
        M.row(1) << -F.g.gr0 / F.g.g00, 1.0 / (F.w * F.g.g00);
        const Eigen::Vector2d rhs(l2.dot(ue), f.df(t));
        const Eigen::Vector2d ub = M.partialPivLu().solve(rhs);
        return {ub[0], ub[1]};
    }

    void rhs(double t, const std::vector<Vec2>& U, std::vector<Vec2>& out) const {
        std::vector<Vec2> s(n);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < 2; ++c) {
                if (i == 0) s[i][c] = U[1][c] - U[0][c];
                else if (i == n - 1) s[i][c] = U[n - 1][c] - U[n - 2][c];
                else s[i][c] = limit(lim, U[i][c] - U[i - 1][c], U[i + 1][c] - U[i][c]);
            }
        }
        std::vector<Vec2> flux(n + 1);
        {
            // Inner face: nothing enters from r < r_in.
            const FluxMatrices F = flux_matrices(m, t, r_in, k);
            const Eigen::Vector2d uR(U[0][0] - 0.5 * s[0][0], U[0][1] - 0.5 * s[0][1]);
            const Eigen::Vector2d fl = F.Aminus * uR;
            flux[0] = {fl[0], fl[1]};
        }
        for (int i = 1; i < n; ++i) {
            const FluxMatrices F = flux_matrices(m, t, face(i), k);
            const Eigen::Vector2d uL(U[i - 1][0] + 0.5 * s[i - 1][0], U[i - 1][1] + 0.5 * s[i - 1][1]);
            const Eigen::Vector2d uR(U[i][0] - 0.5 * s[i][0], U[i][1] - 0.5 * s[i][1]);
            const Eigen::Vector2d fl = F.Aplus * uL + F.Aminus * uR;
            flux[i] = {fl[0], fl[1]};
        }
        {
            const FluxMatrices F = flux_matrices(m, t, a, k);
            const Vec2 ub = boundary_state(t, U);
            const Eigen::Vector2d fl = F.A * Eigen::Vector2d(ub[0], ub[1]);
            flux[n] = {fl[0], fl[1]};
        }
        out.resize(n);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 2; ++c) out[i][c] = -(flux[i + 1][c] - flux[i][c]) / h;
    }
};

}  // namespace

DirectResult dn_direct(const RadialMetric& metric, const BoundaryData& f, double a, const DirectOptions& o) {
    if (o.n_cells < 8) throw ConfigurationError("dn_direct needs at least 8 cells");
    if (!(o.cfl > 0.0 && o.cfl <= 0.9)) {
        std::ostringstream os;
        os << "CFL number " << o.cfl << " outside (0, 0.9]";
        throw ConfigurationError(os.str());
    }
    if (!(a > 0.0)) throw PreconditionError("cylinder radius must be positive");
    const double width = f.support_hi - f.support_lo;
    const double x0_start = o.x0_start != 0.0 || o.x0_end != 0.0 ? o.x0_start : f.support_lo - 0.1 * width;
    const double x0_end = o.x0_start != 0.0 || o.x0_end != 0.0 ? o.x0_end : f.support_hi + 0.1 * width;
    if (!(x0_end > x0_start)) throw PreconditionError("output window must be nonempty");
    if (f.support_lo < x0_start) throw PreconditionError("f must vanish before the start of the window");
    const double dx_out = o.dx0_out > 0.0 ? o.dx0_out : (x0_end - x0_start) / 1000.0;

    // Trapped region over the window decides the inner boundary.
    constexpr int n_probe = 64;
    std::optional<double> trapped_min;
    bool always_trapped = true;
    for (int i = 0; i <= n_probe; ++i) {
        const double t = x0_start + (x0_end - x0_start) * i / n_probe;
        const CharSpeeds s = char_speeds(metric, t, a);
        if (!(s.c_minus < 0.0 && s.c_plus > 0.0)) {
            std::ostringstream os;
            os << "the cylinder r = " << a << " is not outside the horizon at x0 = " << t;
            throw ConfigurationError(os.str());
        }
        const auto rt = trapped_radius(metric, t, a);
        if (!rt) always_trapped = false;
        else trapped_min = trapped_min ? std::min(*trapped_min, *rt) : *rt;
    }
    DirectResult res;
    double r_in, h;
    if (o.r_inner > 0.0) {
        r_in = o.r_inner;
        if (!(r_in < a)) throw ConfigurationError("r_inner must lie below a");
        if (always_trapped && trapped_min && r_in > *trapped_min) {
            std::ostringstream os;
            os << "truncation radius " << r_in << " lies outside the trapped region r <= " << *trapped_min
               << "; the inner boundary would reflect into the exterior";
            throw ConfigurationError(os.str());
        }
        h = (a - r_in) / o.n_cells;
    } else if (always_trapped && trapped_min) {
        h = (a - *trapped_min) / (o.n_cells - 3);
        r_in = *trapped_min - 3.0 * h;
        if (!(r_in > 0.0)) throw ConfigurationError("trapped region too thin for three cells inside the horizon");
    } else {
        r_in = 0.5 * a;
        h = (a - r_in) / o.n_cells;
    }
    res.trapped_inner = always_trapped && trapped_min && r_in <= *trapped_min;
    res.r_inner = r_in;
    res.h = h;

    double vmax = 0.0;
    for (int i = 0; i <= n_probe; ++i) {
        const double t = x0_start + (x0_end - x0_start) * i / n_probe;
        for (int j = 0; j <= o.n_cells; ++j) {
            const CharSpeeds s = char_speeds(metric, t, r_in + (a - r_in) * j / o.n_cells);
            vmax = std::max({vmax, std::abs(s.c_minus), std::abs(s.c_plus)});
        }
    }
    const double dt_cfl = o.cfl * h / vmax;
    const int substeps = static_cast<int>(std::ceil(dx_out / dt_cfl));
    const double dt = dx_out / substeps;
    res.dt = dt;

    const Solver S{metric, f, a, r_in, h, o.weight_exponent, o.limiter, o.n_cells};
    const int n = o.n_cells;
    std::vector<Vec2> U(n, Vec2{0.0, 0.0}), U1(n), U2(n), L(n);
    const int n_out = static_cast<int>(std::llround((x0_end - x0_start) / dx_out));
    auto record = [&](double t) {
        res.sample.x0.push_back(t);
        res.sample.f.push_back(f.f(t));
        // du/dr at r = a from the interior cells by a one-sided second-order stencil.
        res.sample.lambda_f.push_back(1.5 * U[n - 1][0] - 0.5 * U[n - 2][0]);
        if (o.region_radius > 0.0)
            for (int i = 0; i < n; ++i)
                if (r_in + h * (i + 1) < o.region_radius)
                    res.max_abs_inside = std::max({res.max_abs_inside, std::abs(U[i][0]), std::abs(U[i][1])});
    };
    res.sample.method = DNMethod::direct_fd;
    record(x0_start);
    for (int k = 1; k <= n_out; ++k) {
        const double t_base = x0_start + (k - 1) * dx_out;
        for (int s = 0; s < substeps; ++s) {
            const double t = t_base + s * dt;
            S.rhs(t, U, L);
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < 2; ++c) U1[i][c] = U[i][c] + dt * L[i][c];
            S.rhs(t + dt, U1, L);
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < 2; ++c) U2[i][c] = 0.75 * U[i][c] + 0.25 * (U1[i][c] + dt * L[i][c]);
            S.rhs(t + 0.5 * dt, U2, L);
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < 2; ++c) U[i][c] = U[i][c] / 3.0 + 2.0 / 3.0 * (U2[i][c] + dt * L[i][c]);
            ++res.steps;
        }
        record(x0_start + k * dx_out);
    }
    return res;
}

DNSample dn_characteristic(const RadialMetric& metric, const BoundaryData& f, double a,
                           const std::vector<double>& x0_grid) {
    DNSample s;
    s.method = DNMethod::characteristic;
    for (double t : x0_grid) {
        const CharPoint p = char_point(metric, a, t, a);
        if (!p.valid) throw ConfigurationError("characteristic speeds vanish on the cylinder");
        s.x0.push_back(t);
        s.f.push_back(f.f(t));
        // u = f(phi1 - a) and phi2 carries no data (nothing leaves the horizon).
        s.lambda_f.push_back(dalembert_dn(f, p.phi1 - a) * p.phi1_r);
    }
    return s;
}

bool RefinementStudy::monotone() const {
    for (std::size_t i = 1; i < errors.size(); ++i)
        if (!(errors[i] < errors[i - 1])) return false;
    return true;
}

RefinementStudy refinement_study(const RadialMetric& metric, const BoundaryData& f, double a,
                                 const std::vector<int>& n_cells,
                                 const std::function<std::vector<double>(const std::vector<double>&)>& reference,
                                 const DirectOptions& options, unsigned threads) {
    RefinementStudy st;
    st.n_cells = n_cells;
    st.h.resize(n_cells.size());
    st.errors.resize(n_cells.size());
    parallel_for(n_cells.size(), threads, [&](std::size_t i) {
        DirectOptions o = options;
        o.n_cells = n_cells[i];
        const DirectResult r = dn_direct(metric, f, a, o);
        const auto ref = reference(r.sample.x0);
        double e = 0.0;
        for (std::size_t k = 0; k < ref.size(); ++k) e = std::max(e, std::abs(r.sample.lambda_f[k] - ref[k]));
        st.h[i] = r.h;
        st.errors[i] = e;
    });
    for (std::size_t i = 1; i < n_cells.size(); ++i)
        st.orders.push_back(std::log(st.errors[i - 1] / st.errors[i]) / std::log(st.h[i - 1] / st.h[i]));
    return st;
}

// ---------------------------------------------------------------------------

RadialMetric pullback_radial(const RadialMetric& metric, std::function<double(double)> psi,
                             std::function<double(double)> dpsi, const std::string& label) {
    return RadialMetric::custom(
        [metric, psi, dpsi](double x0, double rho) {
            const RadialComponents g = metric.at(x0, psi(rho));
            const double d = dpsi(rho);
            return RadialComponents{g.g00, g.gr0 / d, g.grr / (d * d)};
        },
        metric.b1(), metric.length_scale(), label);
}

IsometryReport isometry_map(const RadialMetric& g, const RadialMetric& g1, double a, const IsometryOptions& o) {
    const CharCoordinates cg = build_char_coords(g, a, o.mesh);
    IsometryReport rep;
    const auto& co = o.mesh.characteristics;
    const BoundaryData probe = o.probe ? *o.probe : gaussian_pulse(o.mesh.x0_min + a, 0.25 * a);

    auto invert = [&](double Y0, double Y1, double x_guess, double r_guess, double& xs, double& rs) {
        double x = x_guess, r = std::min(r_guess, a);
        double resid = std::numeric_limits<double>::infinity();
        for (int it = 0; it < o.newton_max_iter; ++it) {
            const CharPoint p = char_point(g1, a, x, r, co);
            if (!p.valid) throw NumericalError("inverse coordinates left the domain of the second metric");
            const double F0 = p.y0() - Y0, F1 = p.y1() - Y1;
            resid = std::max(std::abs(F0), std::abs(F1));
            if (resid < o.newton_tol) break;
            Eigen::Matrix2d J;
            J << 0.5 * (p.phi1_x0 - p.phi2_x0), 0.5 * (p.phi1_r - p.phi2_r), 0.5 * (p.phi1_x0 + p.phi2_x0),
                0.5 * (p.phi1_r + p.phi2_r);
            const Eigen::Vector2d d = J.partialPivLu().solve(Eigen::Vector2d(F0, F1));
            double lam = 1.0;
            // Keep r inside (0, a]; the forward map is only defined there.
            while (r - lam * d[1] > a || r - lam * d[1] <= 0.0) lam *= 0.5;
            x -= lam * d[0];
            r -= lam * d[1];
            if (std::max(std::abs(d[0]), std::abs(d[1])) * lam < 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        xs = x;
        rs = r;
        return resid;
    };

    for (std::size_t i = 0; i < cg.x0.size(); ++i) {
        for (std::size_t j = 0; j < cg.r.size(); ++j) {
            const CharPoint& p = cg.at(i, j);
            if (!p.valid) continue;
            double xs, rs;
            const double res = invert(p.y0(), p.y1(), cg.x0[i], cg.r[j], xs, rs);
            rep.max_newton_residual = std::max(rep.max_newton_residual, res);
            rep.x0.push_back(cg.x0[i]);
            rep.r.push_back(cg.r[j]);
            rep.x0p.push_back(xs);
            rep.rp.push_back(rs);
            if (j + 1 == cg.r.size())
                rep.boundary_defect = std::max({rep.boundary_defect, std::abs(xs - cg.x0[i]), std::abs(rs - a)});
            const CharPoint q = char_point(g1, a, xs, rs, co);
            rep.solution_defect =
                std::max(rep.solution_defect, std::abs(probe.f(q.phi1 - a) - probe.f(p.phi1 - a)));
        }
    }

    // Points just outside the horizon of g should land just outside that of g1.
    try {
        const auto trapped = trapped_radius(g, cg.x0.front(), a);
        const auto trapped1 = trapped_radius(g1, cg.x0.front(), a);
        if (trapped && trapped1) {
            double worst = 0.0;
            for (double x : cg.x0) {
                const double rh = *trapped_radius(g, x, a);
                const double r = rh + o.horizon_offset * (a - rh);
                const CharPoint p = char_point(g, a, x, r, co);
                if (!p.valid) continue;
                double xs, rs;
                invert(p.y0(), p.y1(), x, r, xs, rs);
                const double rh1 = *trapped_radius(g1, xs, a);
                worst = std::max(worst, std::abs((rs - rh1) - (r - rh)));
            }
            rep.horizon_defect = worst;
        }
    } catch (const Error&) {
        rep.horizon_defect.reset();
    }

    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) grid.push_back(probe.support_lo + (probe.support_hi - probe.support_lo) * k / 200.0);
    const DNSample d0 = dn_characteristic(g, probe, a, grid);
    const DNSample d1 = dn_characteristic(g1, probe, a, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        rep.dn_max_difference = std::max(rep.dn_max_difference, std::abs(d0.lambda_f[k] - d1.lambda_f[k]));
    rep.dn_match = rep.dn_max_difference <= o.dn_tolerance;
    return rep;
}

}  // namespace horizonlab
