#include <doctest.h>

#include <cmath>

#include "volres/errors.hpp"
#include "volres/gronwall.hpp"

using namespace volres;

namespace {

GronwallInput unit_input() {
    GronwallInput in;
    in.k = Kernel::constant(1.0);
    in.v0 = [](const Point&) { return 1.0; };
    return in;
}

}  // namespace

TEST_SUITE("gronwall") {

TEST_CASE("constant kernel reproduces the exponential") {
    const GronwallInput in = unit_input();
    for (double t : {0.0, 0.25, 0.6, 1.0}) {
        const BoundPoint b = gronwall_bound(in, {t});
        CHECK(b.sharp.value() == doctest::Approx(std::exp(t)).epsilon(1e-10));
        CHECK(b.sup.value() == doctest::Approx(std::exp(t)).epsilon(1e-10));
    }
    const SeriesValue r = resolvent_bound(in.v0, in.k, in.domain, in.measure, 1.0, {0.7}, 1e-12);
    CHECK(r.sum.value() == doctest::Approx(std::exp(0.7)).epsilon(1e-10));
    const BoundCurve curve = gronwall_curve(in, {{0.2}, {0.4}});
    CHECK(curve.m == 1);
    CHECK(curve.points.size() == 2);
}

TEST_CASE("the sharp line is below the sup line") {
    GronwallInput in = unit_input();
    in.p = 2.0;
    in.v0 = [](const Point& x) { return 1.0 + std::sin(6.0 * x[0]); };
    for (double t : {0.3, 0.7, 1.0}) {
        const BoundPoint b = gronwall_bound(in, {t});
        CHECK(b.sharp <= b.sup);
    }
}

TEST_CASE("sequence bounds equal the Picard iterates from zero") {
    // u_n = 1 + int_0^t u_{n-1}, u_0 = 0: u_n(t) = sum_{i<n} t^i / i!
    const GronwallInput in = unit_input();
    const PointFn zero = [](const Point&) { return 0.0; };
    for (int n = 1; n <= 6; ++n) {
        double u = 0.0;
        for (int i = 0; i < n; ++i) u += std::pow(0.8, i) / std::tgamma(i + 1.0);
        CHECK(gronwall_sequence_bound(in, zero, n, {0.8}).sharp.value() == doctest::Approx(u).epsilon(1e-10));
    }
}

TEST_CASE("void order: geometric closed form") {
    GronwallInput in;
    in.domain = Domain::void_set("pts");
    in.measure = Measure::discrete({{0.0, 0.5}, {1.0, 0.5}});
    in.k = Kernel::void_kernel(ScalarFn::constant(0.5));
    in.v0 = [](const Point& x) { return 1.0 + x[0]; };
    // u = v + q * mean(u), q = 0.5: mean(u) = 1.5 / 0.5 = 3
    CHECK(gronwall_bound(in, {0.0}).sharp.value() == doctest::Approx(1.0 + 0.5 * 3.0).epsilon(1e-14));
    in.k = Kernel::void_kernel(ScalarFn::constant(2.0));
    CHECK_THROWS_AS(in.validate(), ConfigError);
}

TEST_CASE("shape conditions") {
    GronwallInput in = unit_input();
    in.k = Kernel::separable(ScalarFn::custom([](double t) { return 2.0 - t; }), ScalarFn::constant(1.0));
    CHECK_THROWS_AS(in.validate(), ConfigError);
    in = unit_input();
    in.measure = Measure::discrete({{0.5, 1.0}});
    CHECK_THROWS_AS(in.validate(), ConfigError);
}

TEST_CASE("vanishing condition") {
    const Domain iv = Domain::interval(0.0, 1.0);
    const Measure leb = Measure::lebesgue();
    const PointFn one = [](const Point&) { return 1.0; };
    CHECK(check_vanishing(Kernel::constant(1.0), iv, leb, 1.0, one, {1.0}, VanishingStrategy::EssentiallyBounded,
                          1.0) == Vanishing::Vanishes);
    CHECK(check_vanishing(Kernel::constant(1.0), iv, leb, 1.0, one, {1.0}, VanishingStrategy::EssentiallyBounded) ==
          Vanishing::Unknown);
    const PointFn sing = [](const Point& s) { return std::pow(s[0], -0.4); };
    CHECK(check_vanishing(Kernel::fractional(0.5, 0.0, 0.0), iv, leb, 1.0, sing, {1.0},
                          VanishingStrategy::Summability) == Vanishing::Vanishes);
}

TEST_CASE("induction check") {
    const GridOperator psi = [](const std::vector<double>& u) {
        std::vector<double> r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = 0.5 * u[i] + 1.0;
        return r;
    };
    std::vector<std::vector<double>> seq{{0.0, 0.0}};
    for (int n = 0; n < 5; ++n) seq.push_back(psi(seq.back()));
    const std::vector<bool> mask{true, true};
    CHECK(induction_check(psi, seq, mask).pass);
    seq[3][1] += 0.1;
    const InductionResult r = induction_check(psi, seq, mask, 1e-12);
    CHECK_FALSE(r.pass);
    CHECK(r.n == 3);
    CHECK(r.index == 1);
}

TEST_CASE("fractional sup bound at beta = 0") {
    // 1 + sum_{n>=1} Gamma(1/2)^n / Gamma(n/2 + 1) = E_{1/2}(sqrt(pi)) = e^pi erfc(-sqrt(pi))
    const double sp = std::sqrt(std::acos(-1.0));
    const SeriesValue b = fractional_sup_bound({0.5}, {0.0}, 1.0, 1.0, {1.0}, 1.0, 1.0, 1e-14);
    CHECK(b.sum.value() == doctest::Approx(std::exp(sp * sp) * std::erfc(-sp)).epsilon(1e-12));
}

}
