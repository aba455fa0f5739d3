#include <doctest.h>

#include <cmath>

#include "volres/errors.hpp"
#include "volres/fractional.hpp"
#include "volres/kernels.hpp"

using namespace volres;

TEST_SUITE("kernels") {

TEST_CASE("kernel evaluation") {
    CHECK(Kernel::constant(1.5).eval1(0.7, 0.2) == 1.5);
    const Kernel f = Kernel::fractional(0.5, 0.25, 0.0, 2.0);
    CHECK(f.eval1(0.5, 0.25) == doctest::Approx(2.0 * std::pow(0.25, -0.5) * std::pow(0.25, -0.25)).epsilon(1e-15));
    const Kernel s = Kernel::separable(ScalarFn::linear(1.0, 2.0), ScalarFn::exp(1.0, -1.0));
    CHECK(s.eval1(0.5, 0.3) == doctest::Approx(2.0 * std::exp(-0.3)).epsilon(1e-15));
    const Kernel sum = Kernel::sum({Kernel::constant(1.0), s});
    CHECK(sum.eval1(0.5, 0.3) == doctest::Approx(1.0 + 2.0 * std::exp(-0.3)).epsilon(1e-15));
    const Kernel prod = Kernel::product({Kernel::constant(2.0), Kernel::constant(3.0)});
    CHECK(prod.eval_point({1.0, 1.0}, {0.5, 0.5}) == 6.0);
    double c = 0.0;
    CHECK(Kernel::constant(1.5).is_constant(&c));
    CHECK(c == 1.5);
}

TEST_CASE("kernel parameters are validated") {
    CHECK_THROWS_AS(Kernel::fractional(0.0, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(Kernel::fractional(0.5, -0.1, 0.0), ConfigError);
    // alpha_p = (alpha - 1) p + 1 must stay positive
    CHECK_THROWS_AS(Kernel::fractional(0.5, 0.0, 0.0).validate(2.5), ConfigError);
    CHECK_NOTHROW(Kernel::fractional(0.5, 0.0, 0.0).validate(1.5));
    CHECK_THROWS_AS(Kernel::product({Kernel::constant(1.0)}).validate_domain(Domain::interval(0.0, 1.0)),
                    ConfigError);
}

TEST_CASE("monotonicity and submultiplicativity checks") {
    const Domain iv = Domain::interval(0.0, 1.0);
    const Kernel inc = Kernel::separable(ScalarFn::linear(1.0, 1.0), ScalarFn::constant(1.0));
    CHECK(check_monotone(inc, iv, 200).pass);
    const Kernel dec = Kernel::separable(ScalarFn::linear(2.0, -1.0), ScalarFn::constant(1.0));
    const MonotoneReport r = check_monotone(dec, iv, 200);
    REQUIRE_FALSE(r.pass);
    CHECK(r.k_mid > r.k_top);
    const std::vector<Triple> tr = sample_triples(iv, 100);
    CHECK(submultiplicative_defect(Kernel::constant(1.0), iv, tr) == doctest::Approx(0.0).scale(1.0));
    CHECK(submultiplicative_defect(Kernel::constant(2.0), iv, tr) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("fractional family closed form at beta = 0") {
    const FractionalResolventParams fp{0.6, 0.0, 1.0};
    for (int n = 1; n <= 8; ++n)
        for (double x : {0.1, 1.0, 4.0}) {
            const double exact = std::exp(n * std::lgamma(0.6) - std::lgamma(0.6 * n) + (0.6 * n - 1.0) * std::log(x));
            CHECK(fractional_f(fp, n, x, 0.3) == doctest::Approx(exact).epsilon(1e-12));
        }
    CHECK(fp.c_hat(5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fractional family against adaptive high-precision quadrature") {
    // alpha = 0.7, beta = 0.3, p = 1; reference values from nested
    // 30-digit quadrature of the defining recursion
    const FractionalResolventParams fp{0.7, 0.3, 1.0};
    struct Ref {
        int n;
        double x, y, value;
    };
    const Ref refs[] = {
        {2, 0.5, 0.2, 3.0503271312447076},    {2, 2.0, 1e-3, 25.109149565371769},
        {2, 1e-3, 2.0, 0.079046578559422117}, {2, 3.0, 0.7, 2.7144293730389536},
        {3, 0.5, 0.2, 2.6980301632271139},    {3, 2.0, 1e-3, 55.338730614435022},
        {3, 1e-3, 2.0, 0.00056124712595554874}, {3, 3.0, 0.7, 5.3193708037925838},
    };
    for (const Ref& r : refs) {
        CAPTURE(r.n);
        CAPTURE(r.x);
        CAPTURE(r.y);
        const double f = fractional_f(fp, r.n, r.x, r.y);
        CHECK(f == doctest::Approx(r.value).epsilon(1e-10));
        CHECK(f <= fractional_f_bound(fp, r.n, r.x, r.y) * (1.0 + 1e-12));
    }
    // two exponent pairs, multi-index (1, 2)
    FractionalFamily fam({0.8, 1.5}, {0.3, 0.5});
    CHECK(fam.multi_index(2, 1) == std::vector<int>{1, 2});
    CHECK(fam.component(2, 1, 0.5, 0.2) == doctest::Approx(0.99615844020065988).epsilon(1e-10));
}

}
