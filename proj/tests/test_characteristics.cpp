#include "doctest.h"
#include "horizonlab/characteristics.hpp"
#include "horizonlab/error.hpp"

#include <cmath>
#include <random>

using namespace horizonlab;

namespace {
RadialMetric acoustic(double a) { return acoustic_to_radial(TimeProfile::constant(a)); }
}  // namespace

TEST_CASE("radial characteristic roots") {
    auto r = radial_char_roots(acoustic(-1.0), 0.0, 2.0);
    CHECK(r.s_minus == doctest::Approx(-0.5));
    CHECK(r.s_plus == doctest::Approx(1.5));
    CHECK(r.q == doctest::Approx(1.0));

    r = radial_char_roots(acoustic(0.0), 4.0, 0.3);
    CHECK(r.s_minus == -1.0);
    CHECK(r.s_plus == 1.0);

    r = radial_char_roots(acoustic(-2.0), 0.0, 1.0);
    CHECK(r.s_minus == doctest::Approx(1.0));
    CHECK(r.s_plus == doctest::Approx(3.0));

    const auto bad = RadialMetric::custom([](double, double) { return RadialComponents{1.0, 0.0, 1.0}; },
                                          TimeProfile::constant(0.0), 1.0);
    CHECK_THROWS_AS(radial_char_roots(bad, 0.0, 1.0), HyperbolicityError);
}

TEST_CASE("characteristic speeds") {
    auto c = char_speeds(acoustic(-1.0), 0.0, 1.0);
    CHECK(c.c_plus == 0.0);
    CHECK(c.c_minus == doctest::Approx(-2.0));
    c = char_speeds(acoustic(1.0), 0.0, 1.0);
    CHECK(c.c_plus == doctest::Approx(2.0));
    CHECK(c.c_minus == 0.0);
    // |c_pm -+ 1| <= K / r on the far field.
    for (double r = 50.0; r <= 500.0; r *= 1.3) {
        c = char_speeds(acoustic(-1.0), 0.0, r);
        CHECK(std::abs(c.c_plus - 1.0) * r <= 1.0 + 1e-9);
        CHECK(std::abs(c.c_minus + 1.0) * r <= 1.0 + 1e-9);
    }
}

TEST_CASE("factor speeds agree with characteristic speeds") {
    auto b = factor_speeds_bpm(acoustic(0.0), 0.0, 3.0);
    CHECK(b.b_plus == 1.0);
    CHECK(b.b_minus == -1.0);
    b = factor_speeds_bpm(acoustic(-1.0), 0.0, 2.0);
    CHECK(b.b_plus == doctest::Approx(0.5));
    CHECK(b.b_minus == doctest::Approx(-1.5));

    // A non-acoustic metric with g00 != 1 exercises the division.
    const auto m = RadialMetric::custom(
        [](double x0, double r) {
            const double g00 = 1.0 + 0.3 / (1.0 + r * r * r) + 0.1 * std::sin(x0) / (1.0 + r * r * r);
            const double gr0 = -1.2 / r;
            return RadialComponents{g00, gr0, (gr0 * gr0 - 1.0 - 0.2 / (1.0 + r)) / g00};
        },
        TimeProfile::constant(-1.2), 1.2);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-5, 5), ur(0.1, 20);
    for (int i = 0; i < 20; ++i) {
        const double x0 = ux(rng), r = ur(rng);
        const auto bb = factor_speeds_bpm(m, x0, r);
        const auto cc = char_speeds(m, x0, r);
        const double g00 = m.at(x0, r).g00;
        CHECK(bb.b_plus / g00 == doctest::Approx(cc.c_plus).epsilon(1e-12));
        CHECK(bb.b_minus / g00 == doctest::Approx(cc.c_minus).epsilon(1e-12));
    }
}

TEST_CASE("surface classification of spheres") {
    const auto m = acoustic(-2.0);
    CHECK(classify_surface(m, 0.0, 2.0).verdict == SurfaceVerdict::outermost_trapped);
    CHECK(classify_surface(m, 0.0, 1.0).verdict == SurfaceVerdict::trapped);
    CHECK(classify_surface(m, 0.0, 3.0).verdict == SurfaceVerdict::untrapped);
    CHECK(classify_surface(acoustic(2.0), 0.0, 2.0).verdict == SurfaceVerdict::outermost_antitrapped);
    CHECK(classify_surface(acoustic(2.0), 0.0, 1.0).verdict == SurfaceVerdict::antitrapped);
    for (double r : {0.3, 1.0, 5.0, 40.0})
        CHECK(classify_surface(acoustic(0.0), 0.0, r).verdict == SurfaceVerdict::untrapped);

    // Time-dependent profile: outermost-trapped exactly at |A(t)|.
    const auto ramp = acoustic_to_radial(TimeProfile::tanh_ramp(-2.0, 0.5));
    for (double t : {-3.0, 0.0, 0.7, 4.0}) {
        const double rs = std::abs(ramp.b1().value(t));
        CHECK(classify_surface(ramp, t, rs).verdict == SurfaceVerdict::outermost_trapped);
        CHECK(classify_surface(ramp, t, rs * (1 - 1e-6)).verdict == SurfaceVerdict::trapped);
        CHECK(classify_surface(ramp, t, rs * (1 + 1e-6)).verdict == SurfaceVerdict::untrapped);
        CHECK(classify_surface(ramp, t, 0.5 * rs).verdict == SurfaceVerdict::trapped);
    }
}

TEST_CASE("degenerate classification is an explicit error") {
    // q tiny and both roots at zero.
    const auto m = RadialMetric::custom(
        [](double, double) { return RadialComponents{1.0, 0.0, -1e-20}; }, TimeProfile::constant(0.0), 1.0);
    CHECK_THROWS_AS(classify_surface(m, 0.0, 1.0), DegenerateClassificationError);
}

TEST_CASE("cone pairing positivity") {
    Eigen::Matrix3d mink = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
    const auto rep = cone_pairing_check(mink, 1000, 1);
    CHECK(rep.passed());
    CHECK(rep.n_pairs == 1000u * 1000u);

    AcousticFlow flow{TimeProfile::constant(-1.0), {}};
    const auto rep2 = cone_pairing_check(flow.inverse_metric_cartesian(0.0, 2.0, 0.0), 1000, 2);
    CHECK(rep2.passed());
    CHECK(rep2.min_pairing > 0.0);

    // Inside the ergoregion the pairing must still hold.
    AcousticFlow swirl{TimeProfile::constant(-1.0), [](double, double, double) { return 1.0; }};
    CHECK(cone_pairing_check(swirl.inverse_metric_cartesian(0.0, 0.3, 0.4), 500, 3).passed());

    const auto a = cone_pairing_check(flow.inverse_metric_cartesian(0.0, 2.0, 0.0), 50, 9);
    const auto b = cone_pairing_check(flow.inverse_metric_cartesian(0.0, 2.0, 0.0), 50, 9);
    CHECK(a.min_pairing == b.min_pairing);

    Eigen::Matrix3d neg = Eigen::Vector3d(-1.0, -1.0, 1.0).asDiagonal();
    CHECK_THROWS_AS(cone_pairing_check(neg, 10, 1), PreconditionError);
}
