#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "volres/errors.hpp"
#include "volres/extreal.hpp"
#include "volres/measure.hpp"
#include "volres/quadrature.hpp"

using namespace volres;

TEST_SUITE("extreal_measure") {

TEST_CASE("extended reals saturate and keep 0 * inf = 0") {
    const ExtReal inf = ExtReal::infinity();
    CHECK((ExtReal(0.0) * inf) == ExtReal(0.0));
    CHECK((inf * ExtReal(0.0)) == ExtReal(0.0));
    CHECK((inf + ExtReal(1.0)).is_infinite());
    CHECK((ExtReal(2.0) * inf).is_infinite());
    CHECK((ExtReal(2.0) + ExtReal(3.0)).value() == 5.0);
    CHECK(ExtReal(1.0) < inf);
    CHECK(ExtReal(-0.0).value() == 0.0);
    CHECK(ExtReal(INFINITY).is_infinite());
    CHECK_THROWS_AS(ExtReal(-1.0), std::domain_error);
    CHECK_THROWS_AS(ExtReal(NAN), std::domain_error);
    CHECK_THROWS_AS(inf.finite_value(), std::domain_error);
    CHECK(pow(inf, 2.0).is_infinite());
    CHECK(pow(ExtReal(0.0), 0.5).value() == 0.0);
    CHECK(root(ExtReal(16.0), 4.0).value() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(to_ext(-1e-20, 1e-15).value() == 0.0);
    CHECK_THROWS(to_ext(-1.0, 1e-15));
}

TEST_CASE("domains and order") {
    CHECK_THROWS_AS(Domain::interval(1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(Domain::interval(0.0, INFINITY), ConfigError);
    const Domain box = Domain::box({{0.0, 1.0}, {0.0, 2.0}});
    CHECK(box.ordered_dim() == 2);
    CHECK(box.leq({0.2, 0.3}, {0.5, 0.3}));
    CHECK_FALSE(box.leq({0.2, 0.4}, {0.5, 0.3}));
    CHECK(box.contains({1.0, 2.0}));
    CHECK_FALSE(box.contains({1.0, 2.5}));
    const Domain v = Domain::void_set("x");
    CHECK(v.ordered_dim() == 0);
    CHECK(v.leq({3.0}, {-1.0}));
    const Region r = lower_set(Domain::interval(0.0, 2.0), {1.5});
    REQUIRE(r.ranges.size() == 1);
    CHECK(r.ranges[0].lo == 0.0);
    CHECK(r.ranges[0].hi == 1.5);
    CHECK_THROWS_AS(lower_set(Domain::interval(0.0, 2.0), {3.0}), ConfigError);
}

TEST_CASE("measures validate against their domain") {
    const Domain iv = Domain::interval(0.0, 1.0);
    CHECK_NOTHROW(Measure::discrete({{0.0, 1.0}, {0.5, 2.0}}).validate(iv));
    CHECK_THROWS_AS(Measure::discrete({{2.0, 1.0}}).validate(iv), ConfigError);
    CHECK_THROWS_AS(Measure::discrete({{0.5, -1.0}}), ConfigError);
    CHECK(Measure::lebesgue().atomless());
    CHECK_FALSE(Measure::discrete({{0.5, 1.0}}).atomless());
}

TEST_CASE("quadrature against closed forms") {
    const Rule& gl = gauss_legendre(10);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) s += gl.w[i] * std::pow(gl.x[i], 18);
    CHECK(s == doctest::Approx(2.0 / 19.0).epsilon(1e-14));

    const Measure leb = Measure::lebesgue();
    CHECK(integrate_1d([](double x) { return x * x; }, 0.0, 1.0, leb, 1e-13).value.value() ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    // sqrt has an endpoint singularity in its derivative
    CHECK(integrate_1d([](double x) { return std::sqrt(x); }, 0.0, 1.0, leb, 1e-12).value.value() ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-11));
    const Measure w = Measure::weighted(ScalarFn::linear(0.0, 2.0));
    CHECK(integrate_1d([](double) { return 1.0; }, 0.0, 1.0, w, 1e-13).value.value() ==
          doctest::Approx(1.0).epsilon(1e-13));
    const Measure d = Measure::discrete({{0.1, 2.0}, {0.4, 3.0}, {0.9, 5.0}});
    CHECK(integrate_1d([](double x) { return x; }, 0.0, 0.5, d, 1e-13).value.value() ==
          doctest::Approx(0.2 + 1.2).epsilon(1e-15));

    const Domain box = Domain::box({{0.0, 1.0}, {0.0, 2.0}});
    const Measure pm = Measure::product({leb, leb});
    const QuadResult q = integrate([](const Point& x) { return x[0] * x[1]; }, lower_set(box, {1.0, 2.0}), box, pm,
                                   1e-12);
    CHECK(q.value.value() == doctest::Approx(1.0).epsilon(1e-12));

    // int_0^1 x^(-1/2) (1-x)^(-1/2) dx = pi
    CHECK(integrate_singular([](double) { return 1.0; }, 0.5, 0.5).value.value() ==
          doctest::Approx(std::numbers::pi).epsilon(1e-12));
    CHECK_THROWS_AS(integrate_singular([](double) { return 1.0; }, 0.0, 1.0), ConfigError);
}

}
