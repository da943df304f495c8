#include "doctest.h"
#include "horizonlab/error.hpp"
#include "horizonlab/horizons.hpp"

#include <cmath>

using namespace horizonlab;

namespace {

RadialMetric acoustic(const TimeProfile& p) { return acoustic_to_radial(p); }
TimeProfile ramp() { return TimeProfile::tanh_ramp(-2.0, 0.5); }

// Independent DOP853 bisection at rtol 1e-13, frozen.
struct OracleValue {
    double x0, r;
};
constexpr OracleValue kRampOracle[] = {
    {-50.0, 2.499999998475027}, {-5.0, 2.395612258316403}, {-2.0, 2.117257166341184},
    {-1.0, 1.904343245377763},  {0.0, 1.657593400310725},  {1.0, 1.531166681367388},
    {2.0, 1.504525747111573},   {5.0, 1.500011349651205},  {50.0, 1.5},
};
constexpr double kAppearance = -0.248809511877343;

}  // namespace

TEST_CASE("constant black hole horizon sits at r = 1") {
    const auto m = acoustic(TimeProfile::constant(-1.0));
    const auto outer = separatrix_shoot(m, HorizonKind::outer_black, -10, 10);
    for (double r : outer.r) CHECK(std::abs(r - 1.0) < 1e-6);
    const auto inner = inner_separatrix(m, HorizonKind::inner_black, -10, 10);
    for (std::size_t i = 0; i < inner.r.size(); ++i) CHECK(std::abs(inner.r[i] - outer.r[i]) < 1e-6);
    CHECK(outer.junction_defect < 1e-6);
    REQUIRE(outer.limit_plus_inf);
    CHECK(*outer.limit_plus_inf == 1.0);
}

TEST_CASE("constant white hole horizon sits at r = 1") {
    const auto m = acoustic(TimeProfile::constant(1.0));
    const auto c = separatrix_shoot(m, HorizonKind::outer_white, -10, 10);
    for (double r : c.r) CHECK(std::abs(r - 1.0) < 1e-6);
    CHECK_THROWS_AS(separatrix_shoot(m, HorizonKind::outer_black, -10, 10), NoHorizonError);
}

TEST_CASE("tanh ramp event horizon matches the frozen oracle") {
    const auto m = acoustic(ramp());
    ShootOptions o;
    o.n_samples = 1001;
    const auto c = separatrix_shoot(m, HorizonKind::outer_black, -50, 50, o);
    for (const auto& p : kRampOracle) CHECK(std::abs(c.at(p.x0) - p.r) < 1e-6);
    CHECK(std::abs(c.r.front() - 2.5) < 1e-3);
    CHECK(std::abs(c.r.back() - 1.5) < 1e-3);
    CHECK(c.junction_defect < 1e-6);
    for (const auto& p : kRampOracle) {
        if (std::abs(p.x0) > 10) continue;
        const auto s = separatrix_at(m, HorizonKind::outer_black, p.x0);
        CHECK(std::abs(s.r - p.r) < 1e-7);
    }
}

TEST_CASE("separatrix defining property") {
    const auto m = acoustic(ramp());
    ShootOptions o;
    const auto s = separatrix_at(m, HorizonKind::outer_black, 0.0, o);
    const double eps = 10 * o.tol;
    const double H = 200 * m.length_scale();
    const auto below = integrate_radial(m, Family::plus, s.r - eps, 0.0, Direction::forward, 0.0, H);
    const auto above = integrate_radial(m, Family::plus, s.r + eps, 0.0, Direction::forward, 0.0, H);
    CHECK(below.fate != Fate::escaped);
    CHECK(above.fate == Fate::escaped);
    const auto c = separatrix_shoot(m, HorizonKind::outer_black, -10, 10);
    CHECK(radial_ode_residual(m, Family::plus, c.x0, c.r) < 1e-6);
}

TEST_CASE("Picard construction agrees with shooting") {
    const auto A = ramp();
    const auto m = acoustic(A);
    PicardOptions po;
    po.n_samples = 1001;
    const auto pr = picard_bounded_solution(A, -50, 50, po);
    CHECK(pr.state.lipschitz < 0.9);
    CHECK(pr.state.residual < 1e-12);
    CHECK(pr.state.X > 15.0);
    CHECK(pr.state.X < 18.0);
    ShootOptions so;
    so.n_samples = 1001;
    const auto sc = separatrix_shoot(m, HorizonKind::outer_black, -50, 50, so);
    REQUIRE(pr.curve.x0.size() == sc.x0.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sc.x0.size(); ++i) {
        CHECK(pr.curve.x0[i] == sc.x0[i]);
        if (sc.x0[i] >= pr.state.T && sc.x0[i] <= pr.state.T + 50) worst = std::max(worst, std::abs(pr.curve.r[i] - sc.r[i]));
    }
    CHECK(worst < 1e-5);
    for (const auto& p : kRampOracle) CHECK(std::abs(pr.curve.at(p.x0) - p.r) < 1e-5);
}

TEST_CASE("Picard map is the bounded solution operator") {
    // The fixed point satisfies the ODE for v = r - |A|: v' = A'... check via r.
    const auto A = ramp();
    const auto pr = picard_bounded_solution(A, -5, 5);
    const auto Fv = picard_map(A, pr.state.x0, pr.state.v);
    double diff = 0.0;
    for (std::size_t i = 0; i < Fv.size(); ++i) diff = std::max(diff, std::abs(Fv[i] - pr.state.v[i]));
    CHECK(diff < 1e-11);
}

TEST_CASE("Picard reports contraction failure for a non-decaying derivative") {
    const auto A = TimeProfile::custom(
        "oscillating", [](double x) { return -2.0 + std::sin(x) / std::log(2.0 + x * x); },
        [](double x) {
            const double l = std::log(2.0 + x * x);
            return std::cos(x) / l - std::sin(x) * 2.0 * x / ((2.0 + x * x) * l * l);
        },
        -2.0, -2.0);
    try {
        picard_bounded_solution(A, -10, 10);
        FAIL("expected ContractionError");
    } catch (const ContractionError& e) {
        CHECK(std::isfinite(e.int_abs_derivative()));
        CHECK(std::isfinite(e.int_t_abs_derivative()));
        CHECK(e.int_abs_derivative() > 0.0);
    }
}

TEST_CASE("appearance and disappearance times") {
    const auto m = acoustic(TimeProfile::tanh_ramp(0.0, -1.0));
    const auto app = appearance_time(m, -10, 10);
    CHECK(std::abs(app.x0 - kAppearance) < 1e-6);
    CHECK(app.zero_crossings == 1);
    CHECK_FALSE(app.multiple_crossings);
    const auto dis = disappearance_time(m, -10, 10);
    CHECK(std::abs(dis.x0 + kAppearance) < 1e-6);

    ShootOptions tight;
    tight.tol = 1e-10;
    tight.radial.ode.atol = 1e-11;
    tight.radial.ode.rtol = 1e-10;
    const auto app2 = appearance_time(m, -10, 10, tight);
    CHECK(std::abs(app2.x0 - app.x0) < 1e-6);
    const auto dis2 = disappearance_time(m, -10, 10, tight);
    CHECK(std::abs(dis2.x0 - dis.x0) < 1e-6);

    CHECK_THROWS_AS(appearance_time(acoustic(TimeProfile::constant(-1.0)), -10, 10), PreconditionError);
}

TEST_CASE("containment follows the monotonicity of |A|") {
    {
        const auto m = acoustic(ramp());  // |A| decreasing
        ShootOptions o;
        o.n_samples = 200;
        const auto c = separatrix_shoot(m, HorizonKind::outer_black, -20, 20, o);
        const auto rep = containment(c, m);
        CHECK(rep.samples == 200);
        CHECK(rep.expected == Containment::event_inside_dynamic);
        CHECK(rep.observed == rep.expected);
        CHECK(rep.consistent());
    }
    {
        const auto m = acoustic(TimeProfile::tanh_ramp(-2.0, -0.5));  // |A| increasing
        ShootOptions o;
        o.n_samples = 200;
        const auto c = separatrix_shoot(m, HorizonKind::outer_black, -20, 20, o);
        const auto rep = containment(c, m);
        CHECK(rep.expected == Containment::dynamic_inside_event);
        CHECK(rep.observed == rep.expected);
    }
    {
        const auto m = acoustic(TimeProfile::constant(-1.0));
        const auto c = separatrix_shoot(m, HorizonKind::outer_black, -5, 5);
        const auto rep = containment(c, m, 1e-6);
        CHECK(rep.observed == Containment::coincident);
        CHECK(rep.consistent());
    }
    const auto d = dynamic_horizon(acoustic(ramp()), -5, 5, 11);
    CHECK(d.r.front() == doctest::Approx(2.0 + 0.5 * std::tanh(5.0)));
}

TEST_CASE("bump metric separates inner and outer horizons") {
    const auto m = radial_bump_metric(-1.0, 2.0, 2.5, 0.3);
    const auto outer = separatrix_at(m, HorizonKind::outer_black, 0.0);
    const auto inner = separatrix_at(m, HorizonKind::inner_black, 0.0);
    CHECK(inner.r < outer.r - 1.0);
    CHECK(std::abs(inner.r - 1.0) < 1e-3);
    CHECK(std::abs(outer.r - 2.67) < 0.05);
}
