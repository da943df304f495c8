#include "doctest.h"
#include "horizonlab/error.hpp"
#include "horizonlab/waves.hpp"

#include <cmath>
#include <limits>

using namespace horizonlab;

namespace {

RadialMetric acoustic(double A) { return acoustic_to_radial(TimeProfile::constant(A)); }

std::vector<double> derivative_of(const BoundaryData& f, const std::vector<double>& x) {
    std::vector<double> out;
    for (double t : x) out.push_back(f.df(t));
    return out;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

}  // namespace

TEST_CASE("flat characteristic coordinates are linear") {
    const double a = 5.0;
    const auto c = build_char_coords(minkowski_radial(), a);
    CHECK(c.clipped == 0);
    for (std::size_t i = 0; i < c.x0.size(); ++i) {
        for (std::size_t j = 0; j < c.r.size(); ++j) {
            const auto& p = c.at(i, j);
            CHECK(std::abs(p.phi1 - (c.x0[i] + c.r[j])) < 1e-9);
            CHECK(std::abs(p.phi2 - (-c.x0[i] + c.r[j])) < 1e-9);
            CHECK(std::abs(p.y0() - c.x0[i]) < 1e-9);
            CHECK(std::abs(p.y1() - c.r[j]) < 1e-9);
        }
    }
    CHECK(c.boundary_identity_defect <= 8 * std::numeric_limits<double>::epsilon() * a);
}

TEST_CASE("acoustic characteristic coordinates are null") {
    const double a = 5.0;
    const auto m = acoustic(-1.0);
    const auto c = build_char_coords(m, a);
    CHECK(c.clipped == 0);
    CHECK(c.max_nullity_residual <= 1e-7);
    CHECK(c.boundary_identity_defect <= 8 * std::numeric_limits<double>::epsilon() * a);
    CHECK(c.jacobian_min > 0.0);
    for (const auto& p : c.points) CHECK(std::abs(g_s_tau(m, 0.0, 3.0, p)) > 0.0);

    // Variational derivatives agree with differences of the coordinates.
    const double x = 0.3, r = 2.0, d = 1e-5;
    const auto p = char_point(m, a, x, r);
    const auto px = char_point(m, a, x + d, r), mx = char_point(m, a, x - d, r);
    const auto pr = char_point(m, a, x, r + d), mr = char_point(m, a, x, r - d);
    CHECK(p.phi1_x0 == doctest::Approx((px.phi1 - mx.phi1) / (2 * d)).epsilon(1e-6));
    CHECK(p.phi1_r == doctest::Approx((pr.phi1 - mr.phi1) / (2 * d)).epsilon(1e-6));
    CHECK(p.phi2_x0 == doctest::Approx((px.phi2 - mx.phi2) / (2 * d)).epsilon(1e-6));
    CHECK(p.phi2_r == doctest::Approx((pr.phi2 - mr.phi2) / (2 * d)).epsilon(1e-6));
}

TEST_CASE("cylinder inside the horizon is rejected") {
    CHECK_THROWS_AS(build_char_coords(acoustic(-1.0), 0.8), ConfigurationError);
    CHECK_THROWS_AS(dn_direct(acoustic(-1.0), gaussian_pulse(0, 0.1), 0.8), ConfigurationError);
}

TEST_CASE("d'Alembert ingoing solution") {
    const double a = 5.0;
    const auto c = build_char_coords(minkowski_radial(), a);
    const auto f = gaussian_pulse(0.0, 0.5);
    const auto u = dalembert_solve(c, f);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const auto& p = c.points[k];
        CHECK(u[k] == doctest::Approx(f.f(p.y0() + p.y1() - a)));
    }
    for (double y0 : {-1.0, -0.2, 0.4}) {
        const double h = 1e-5;
        CHECK(dalembert_dn(f, y0) == doctest::Approx((f.f(y0 + h) - f.f(y0 - h)) / (2 * h)).epsilon(1e-8));
    }
    BoundaryData zero = combine(f, 0.0, f, 0.0);
    for (double v : dalembert_solve(c, zero)) CHECK(v == 0.0);
}

TEST_CASE("flat DN map converges to f' at second order") {
    const double a = 5.0;
    const auto f = gaussian_pulse(0.0, 0.5);
    const auto st = refinement_study(minkowski_radial(), f, a, {100, 200, 400},
                                     [&](const std::vector<double>& x) { return derivative_of(f, x); }, {}, 3);
    CHECK(st.monotone());
    for (double p : st.orders) CHECK(p >= 1.5);
    const auto ch = dn_characteristic(minkowski_radial(), f, a, {-1.0, 0.0, 0.7});
    for (std::size_t i = 0; i < ch.x0.size(); ++i) CHECK(ch.lambda_f[i] == doctest::Approx(f.df(ch.x0[i])));
}

TEST_CASE("direct and characteristic DN maps agree for a sink") {
    const double a = 5.0;
    const auto m = acoustic(-1.0);
    const auto f = gaussian_pulse(0.0, 0.5);
    const auto st = refinement_study(
        m, f, a, {100, 200, 400}, [&](const std::vector<double>& x) { return dn_characteristic(m, f, a, x).lambda_f; },
        {}, 3);
    CHECK(st.monotone());
    CHECK(st.errors.back() < 1e-3);
    const auto r = dn_direct(m, f, a);
    CHECK(r.trapped_inner);
    CHECK(r.r_inner < 1.0);
    // b_- = -1/a - 1 gives Lambda f = f' / (1 + 1/a).
    const auto ch = dn_characteristic(m, f, a, {0.3});
    CHECK(ch.lambda_f[0] == doctest::Approx(f.df(0.3) / 1.2));
}

TEST_CASE("DN trace is causal, linear and time invariant") {
    const double a = 5.0;
    const auto m = acoustic(-1.0);
    const auto f = gaussian_pulse(0.5, 0.5 / 8.6);
    DirectOptions o;
    o.x0_start = -1.0;
    o.x0_end = 2.0;
    const auto r = dn_direct(m, f, a, o);
    for (std::size_t i = 0; i < r.sample.x0.size(); ++i)
        if (r.sample.x0[i] < f.support_lo) CHECK(r.sample.lambda_f[i] == 0.0);
    const auto ch = dn_characteristic(m, f, a, r.sample.x0);
    for (std::size_t i = 0; i < ch.x0.size(); ++i)
        if (ch.x0[i] < 0.0) CHECK(ch.lambda_f[i] == 0.0);

    const auto g = gaussian_pulse(0.8, 0.2);
    const auto fg = combine(f, 2.0, g, -0.5);
    const auto rf = dn_direct(m, f, a, o), rg = dn_direct(m, g, a, o), rfg = dn_direct(m, fg, a, o);
    for (std::size_t i = 0; i < rfg.sample.x0.size(); ++i)
        CHECK(std::abs(rfg.sample.lambda_f[i] - (2.0 * rf.sample.lambda_f[i] - 0.5 * rg.sample.lambda_f[i])) < 1e-12);

    const auto p = gaussian_pulse(0.0, 0.5), q = shifted(p, 1.5);
    DirectOptions op, oq;
    op.x0_start = -5.0;
    op.x0_end = 5.0;
    op.dx0_out = 0.01;
    oq = op;
    oq.x0_start += 1.5;
    oq.x0_end += 1.5;
    const auto dp = dn_direct(m, p, a, op), dq = dn_direct(m, q, a, oq);
    REQUIRE(dp.sample.x0.size() == dq.sample.x0.size());
    CHECK(sup_diff(dp.sample.lambda_f, dq.sample.lambda_f) < 1e-10);
}

TEST_CASE("nothing enters a white hole") {
    const auto m = acoustic(1.0);
    const auto f = gaussian_pulse(0.0, 0.3);
    DirectOptions o;
    o.r_inner = 0.2;
    o.region_radius = 1.0;
    o.n_cells = 280;
    const auto r = dn_direct(m, f, 3.0, o);
    CHECK(r.max_abs_inside == 0.0);
    CHECK_FALSE(r.trapped_inner);
}

TEST_CASE("spherical weight gives the three-dimensional DN map") {
    // u = a f(x0 + r - a) / r, so du/dr = f' - f / a on r = a.
    const double a = 20.0;
    const auto f = gaussian_pulse(0.0, 0.5);
    DirectOptions o;
    o.weight_exponent = 2;
    const auto st = refinement_study(
        minkowski_radial(), f, a, {200, 400, 800},
        [&](const std::vector<double>& x) {
            std::vector<double> out;
            for (double t : x) out.push_back(f.df(t) - f.f(t) / a);
            return out;
        },
        o, 3);
    CHECK(st.monotone());
    for (double p : st.orders) CHECK(p >= 1.5);
}

TEST_CASE("solver configuration errors") {
    DirectOptions o;
    o.cfl = 1.5;
    CHECK_THROWS_AS(dn_direct(minkowski_radial(), gaussian_pulse(0, 0.5), 5.0, o), ConfigurationError);
    DirectOptions o2;
    o2.r_inner = 1.5;  // outside the trapped region r <= 1
    CHECK_THROWS_AS(dn_direct(acoustic(-1.0), gaussian_pulse(0, 0.5), 5.0, o2), ConfigurationError);
}

TEST_CASE("isometry of a metric with itself is the identity") {
    const auto m = acoustic(-1.0);
    IsometryOptions o;
    o.mesh.n_x0 = 7;
    o.mesh.n_r = 7;
    const auto rep = isometry_map(m, m, 5.0, o);
    for (std::size_t k = 0; k < rep.x0.size(); ++k) {
        CHECK(std::abs(rep.x0p[k] - rep.x0[k]) < 1e-9);
        CHECK(std::abs(rep.rp[k] - rep.r[k]) < 1e-9);
    }
    CHECK(rep.boundary_defect < 1e-12);
    CHECK(rep.solution_defect < 1e-9);
    REQUIRE(rep.horizon_defect);
    CHECK(*rep.horizon_defect < 1e-8);
    CHECK(rep.dn_match);
}

TEST_CASE("isometry recovers a radial reparameterization") {
    const double a = 5.0;
    auto psi = [a](double rho) { return rho + 0.1 * (rho - a) * (rho - a) / a; };
    auto dpsi = [a](double rho) { return 1.0 + 0.2 * (rho - a) / a; };
    // r = psi(rho) inverted on rho <= a.
    auto psi_inv = [a](double r) {
        const double c2 = 0.1 / a, c1 = 1.0 - 0.2, c0 = 0.1 * a - r;
        return (-c1 + std::sqrt(c1 * c1 - 4.0 * c2 * c0)) / (2.0 * c2);
    };
    const auto g = minkowski_radial();
    const auto g1 = pullback_radial(g, psi, dpsi, "flat-reparameterized");
    IsometryOptions o;
    o.mesh.n_x0 = 7;
    o.mesh.n_r = 9;
    const auto rep = isometry_map(g, g1, a, o);
    REQUIRE_FALSE(rep.x0.empty());
    for (std::size_t k = 0; k < rep.x0.size(); ++k) {
        CHECK(std::abs(rep.x0p[k] - rep.x0[k]) < 1e-7);
        CHECK(std::abs(rep.rp[k] - psi_inv(rep.r[k])) < 1e-7);
    }
    CHECK(rep.boundary_defect < 1e-9);
    CHECK(rep.solution_defect < 1e-7);
    CHECK_FALSE(rep.horizon_defect);
    CHECK(rep.dn_match);
}

TEST_CASE("different sinks have distinguishable DN maps") {
    IsometryOptions o;
    o.mesh.n_x0 = 3;
    o.mesh.n_r = 3;
    const auto rep = isometry_map(acoustic(-1.0), acoustic(-1.5), 5.0, o);
    CHECK_FALSE(rep.dn_match);
    CHECK(rep.dn_max_difference > 1e-3);
}
