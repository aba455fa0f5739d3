#include <doctest.h>

#include <cmath>
#include <sstream>

#include "volres/errors.hpp"
#include "volres/resolvent.hpp"
#include "volres/volterra_weights.hpp"

using namespace volres;

namespace {

double fact(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST_SUITE("resolvent") {

TEST_CASE("iterated kernels of a constant kernel") {
    const double c = 2.0;
    const QuadratureGrid g = make_grid(Domain::interval(0.0, 1.0), Measure::lebesgue(), 4);
    const ResolventTable tab = iterated_kernels(Kernel::constant(c), Measure::lebesgue(), 1.0, 4, g);
    CHECK(tab.status() == TableStatus::Ok);
    for (int n = 1; n <= 4; ++n)
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double d = g.nodes[i][0] - g.nodes[j][0];
                CHECK(tab.value(n, i, j) == doctest::Approx(std::pow(c, n) * std::pow(d, n - 1) / fact(n - 1))
                                                .epsilon(1e-10)
                                                .scale(1e-12));
            }
    std::ostringstream os;
    tab.write_csv(os);
    CHECK(os.str().rfind("n,t,s,value\n", 0) == 0);
}

TEST_CASE("weighted and discrete measures") {
    const Domain iv = Domain::interval(0.0, 1.0);
    // mu(dr) = 2r dr: R_n(t, s) = (t^2 - s^2)^(n-1) / (n-1)!
    const Measure w = Measure::weighted(ScalarFn::linear(0.0, 2.0));
    const PointwiseIterates it = pointwise_iterates(Kernel::constant(1.0), iv, w, 1.0, {0.9}, {0.2}, 5, 1e-14);
    const double d = 0.81 - 0.04;
    for (int n = 1; n <= 5; ++n) CHECK(it.terms[n - 1] == doctest::Approx(std::pow(d, n - 1) / fact(n - 1)).epsilon(1e-10));

    // counting measure on {0, 1/2, 1}: R_2(r, 0) counts the atoms of [0, r]
    const Measure a = Measure::discrete({{0.0, 1.0}, {0.5, 1.0}, {1.0, 1.0}});
    const PointwiseIterates di = pointwise_iterates(Kernel::constant(1.0), iv, a, 1.0, {1.0}, {0.0}, 3, 1e-14);
    CHECK(di.terms[1] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(di.terms[2] == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("fractional kernel iterates") {
    // R_n(t, s) = Gamma(a)^n / Gamma(n a) (t - s)^(n a - 1)
    const double a = 0.5;
    const PointwiseIterates it = pointwise_iterates(Kernel::fractional(a, 0.0, 0.0), Domain::interval(0.0, 1.0),
                                                    Measure::lebesgue(), 1.0, {0.8}, {0.1}, 6, 1e-14);
    for (int n = 1; n <= 6; ++n) {
        const double exact = std::exp(n * std::lgamma(a) - std::lgamma(n * a) + (n * a - 1.0) * std::log(0.7));
        CHECK(it.terms[n - 1] == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("resolvent series and the Volterra identity") {
    const Domain iv = Domain::interval(0.0, 1.0);
    const Measure leb = Measure::lebesgue();
    const double c = 1.5;
    const SeriesValue r = resolvent_series(Kernel::constant(c), iv, leb, 1.0, {0.9}, {0.3}, 1e-13);
    CHECK(r.sum.value() == doctest::Approx(c * std::exp(c * 0.6)).epsilon(1e-10));
    CHECK(volterra_residual(Kernel::constant(c), iv, leb, {0.9}, {0.3}) < 1e-8);
    const SeriesValue I = series_function_I(Kernel::constant(c), iv, leb, 1.0, {0.8}, 1e-13);
    CHECK(I.sum.value() == doctest::Approx(std::exp(c * 0.8) - 1.0).epsilon(1e-10));
}

TEST_CASE("divergent void series") {
    const Domain v = Domain::void_set("pair");
    const Measure m = Measure::discrete({{0.0, 1.0}, {1.0, 1.0}});
    const SeriesValue I = series_function_I(Kernel::void_kernel(ScalarFn::constant(0.6)), v, m, 1.0, {0.0}, 1e-12);
    CHECK(I.sum.is_infinite());
}

TEST_CASE("sum decomposition") {
    const double a = 1.0, b = 2.0, t = 0.9, s = 0.1;
    const auto parts = sum_decomposition({Kernel::constant(a), Kernel::constant(b)}, Domain::interval(0.0, 1.0),
                                         Measure::lebesgue(), 3, t, s);
    CHECK(parts.size() == 8);
    double total = 0.0;
    for (const auto& [j, v] : parts) {
        double c = 1.0;
        for (int d : j) c *= d == 1 ? a : b;
        CHECK(v == doctest::Approx(c * std::pow(t - s, 2) / 2.0).epsilon(1e-10));
        total += v;
    }
    CHECK(total == doctest::Approx(27.0 * 0.32).epsilon(1e-10));
}

TEST_CASE("product bound and fractional constant") {
    const Domain iv = Domain::interval(0.0, 1.0);
    const std::vector<AxisFactor> f = {{Kernel::constant(2.0), iv, Measure::lebesgue()},
                                       {Kernel::constant(3.0), iv, Measure::lebesgue()}};
    const ExtReal b = product_bound(f, 1.0, 3, {1.0, 0.5}, {0.0, 0.0});
    CHECK(b.value() == doctest::Approx(8.0 / 2.0 * 27.0 * 0.25 / 2.0).epsilon(1e-10));
    CHECK(fractional_lp_constant({0.5, 0.7}, {0.0, 0.0}, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fractional_lp_constant({0.5}, {0.2}, 1.0) >= 1.0);
}

}
