#include <doctest.h>

#include <cmath>
#include <numbers>

#include "volres/errors.hpp"
#include "volres/specfun.hpp"

using namespace volres;

namespace {

double ml(double a, double b, double p, double z) { return mittag_leffler({a, b, p}, z, 1e-16).sum.value(); }

}  // namespace

TEST_SUITE("specfun") {

TEST_CASE("log-gamma and gamma against the C library") {
    for (double x : {1e-6, 0.01, 0.3, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 55.5, 170.0, 1e4}) {
        CAPTURE(x);
        CHECK(ln_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13).scale(1.0));
    }
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("digamma and beta") {
    CHECK(digamma(1.0) == doctest::Approx(-0.57721566490153286).epsilon(1e-14));
    CHECK(digamma(0.5) == doctest::Approx(-0.57721566490153286 - 2.0 * std::log(2.0)).epsilon(1e-14));
    for (double x : {0.2, 1.3, 7.9, 40.0}) CHECK(digamma(x + 1.0) - digamma(x) == doctest::Approx(1.0 / x).epsilon(1e-12));
    CHECK(beta(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(ln_beta(0.5, 0.5) == doctest::Approx(std::log(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("minimum of the gamma function") {
    const GammaMin g = gamma_min_point();
    CHECK(g.x_gamma == doctest::Approx(1.4616321449683623).epsilon(1e-12));
    CHECK(g.gamma_at_min == doctest::Approx(0.88560319441088870).epsilon(1e-13));
}

TEST_CASE("mittag-leffler special cases") {
    for (double z : {0.0, 0.5, 1.0, 4.0, 10.0, 30.0}) {
        CAPTURE(z);
        CHECK(ml(1.0, 1.0, 1.0, z) == doctest::Approx(std::exp(z)).epsilon(1e-13));
        CHECK(ml(2.0, 1.0, 1.0, z * z) == doctest::Approx(std::cosh(z)).epsilon(1e-12));
        // sum_{n>=1} z^n / (n-1)! = z e^z
        CHECK(ml(1.0, 0.0, 1.0, z) == doctest::Approx(z * std::exp(z)).epsilon(1e-13));
    }
    // E_{1/2}(z) = exp(z^2) erfc(-z)
    for (double z : {0.1, 0.7, 1.5, 3.0})
        CHECK(ml(0.5, 1.0, 1.0, z) == doctest::Approx(std::exp(z * z) * std::erfc(-z)).epsilon(1e-12));
    const SeriesValue v = mittag_leffler({1.0, 1.0, 1.0}, 1.0, 1e-12);
    CHECK(v.converged);
    CHECK(std::abs(v.sum.value() - std::numbers::e) <= v.tail_bound.value() + 1e-15);
}

TEST_CASE("mittag-leffler with p > 1 against a direct sum") {
    double direct = 0.0;
    for (int n = 0; n < 200; ++n) direct += std::exp(n * std::log(2.5) - 0.5 * std::lgamma(n + 1.0));
    CHECK(ml(1.0, 1.0, 2.0, 2.5) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("log-concave series") {
    const SeriesValue g = sum_log_concave([](int n) { return n * std::log(0.5); }, 0, 1e-15);
    CHECK(g.sum.value() == doctest::Approx(2.0).epsilon(1e-14));
    const SeriesValue d = sum_log_concave([](int n) { return n * std::log(2.0); }, 0, 1e-12, 200);
    CHECK_FALSE(d.converged);
}

}
