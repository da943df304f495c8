#include "doctest.h"
#include "horizonlab/error.hpp"
#include "horizonlab/profile.hpp"

#include <cmath>

using namespace horizonlab;

TEST_CASE("closed-form profiles evaluate with limits and derivatives") {
    const auto a = TimeProfile::tanh_ramp(-2.0, 0.5);
    CHECK(a(0.0) == doctest::Approx(-2.0));
    CHECK(a.limit_minus() == doctest::Approx(-2.5));
    CHECK(a.limit_plus() == doctest::Approx(-1.5));
    CHECK(a.sup_abs() == doctest::Approx(2.5));
    CHECK(a.derivative(0.3) == doctest::Approx(0.5 / std::pow(std::cosh(0.3), 2)));

    const auto b = TimeProfile::rational_bump(-1.0, -0.5, 1.0, 2.0);
    CHECK(b(1.0) == doctest::Approx(-1.5));
    CHECK(b.limit_minus() == doctest::Approx(-1.0));
    const double h = 1e-6;
    CHECK(b.derivative(2.3) == doctest::Approx((b(2.3 + h) - b(2.3 - h)) / (2 * h)).epsilon(1e-8));
    CHECK(b.inf() == doctest::Approx(-1.5));
}

TEST_CASE("tabulated profile interpolates and splices continuously") {
    const auto p = TimeProfile::tabulated({-2.0, -1.0, 0.0, 1.0, 2.0}, {-1.0, -1.2, -1.5, -1.7, -1.8});
    CHECK(p(0.0) == doctest::Approx(-1.5));
    CHECK(p(-5.0) == doctest::Approx(-1.0));
    CHECK(p(5.0) == doctest::Approx(-1.8));
    // Zero end slopes make the derivative continuous across the splice.
    CHECK(std::abs(p.derivative(2.0 - 1e-9)) < 1e-6);
    CHECK(std::abs(p.derivative(-2.0 + 1e-9)) < 1e-6);
    const double h = 1e-6;
    CHECK(p.derivative(0.4) == doctest::Approx((p(0.4 + h) - p(0.4 - h)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("profile validation") {
    CHECK_THROWS_AS(TimeProfile::tabulated({0.0, 0.0}, {1.0, 2.0}), PreconditionError);
    CHECK_THROWS_AS(TimeProfile::tanh_ramp(0.0, 1.0, 0.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(TimeProfile::constant(std::nan("")), PreconditionError);
}
