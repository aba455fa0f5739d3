#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "volres/errors.hpp"
#include "volres/fixpoint.hpp"

using namespace volres;

TEST_SUITE("fixpoint") {

TEST_CASE("linear Volterra problem: certified and tight") {
    const CatalogProblem pr = linear_volterra_problem(2.0, 6);
    PicardOptions po;
    po.tol = 1e-8;
    const PicardResult sol = picard_solve(pr.op, pr.x0, po);
    REQUIRE(sol.cert.converged);
    CHECK(sol.cert.closed_form);
    const std::size_t last = pr.op.grid.size() - 1;
    for (int n = 1; n <= sol.cert.iterates; ++n) {
        double err = 0.0;
        for (std::size_t i = 0; i <= last; ++i)
            err = std::max(err, std::abs(sol.iterates[n][i] - std::exp(2.0 * pr.op.grid.nodes[i][0])));
        const ErrorBound b = error_bound(sol.cert, n, last);
        CHECK(err <= b.table.value() + 1e-6);
        REQUIRE(b.closed_form.has_value());
        CHECK(b.table.value() <= b.closed_form->value() * (1.0 + 1e-9) + 1e-9);
    }
    CHECK_THROWS_AS(error_bound(sol.cert, 0, last), std::out_of_range);
    CHECK_THROWS_AS(error_bound(sol.cert, static_cast<int>(sol.cert.B.size()) + 1, last), std::out_of_range);
}

TEST_CASE("scalar contraction: geometric bound") {
    const CatalogProblem pr = banach_problem(0.5, 1.0, 0.0);
    PicardOptions po;
    po.tol = 1e-12;
    po.max_iter = 60;
    const PicardResult sol = picard_solve(pr.op, pr.x0, po);
    CHECK(sol.x_hat[0] == doctest::Approx(2.0).epsilon(1e-11));
    for (int n = 1; n <= 10; ++n)
        CHECK(error_bound(sol.cert, n, 0).table.value() == doctest::Approx(2.0 * std::pow(0.5, n)).epsilon(1e-13));
}

TEST_CASE("non-contraction is refused") {
    CatalogProblem pr = banach_problem(0.5, 1.0, 0.0);
    pr.op.apply = [](const GridFn& x) { return x; };
    pr.op.lambda_kernel = Kernel::void_kernel(ScalarFn::constant(1.0));
    CHECK_THROWS_AS(picard_solve(pr.op, {1.0}, PicardOptions{}), NumericalFailure);
}

TEST_CASE("Abel equation converges to the discrete fixed point") {
    const CatalogProblem pr = abel_problem(0.5, 1.0, 5);
    PicardOptions po;
    po.tol = 1e-9;
    po.max_iter = 80;
    const PicardResult sol = picard_solve(pr.op, pr.x0, po);
    REQUIRE(sol.cert.converged);
    for (std::size_t i = 0; i < pr.reference.size(); ++i)
        CHECK(sol.x_hat[i] == doctest::Approx(pr.reference[i]).epsilon(1e-7));
}

TEST_CASE("Lipschitz profile and uniqueness") {
    const Domain iv = Domain::interval(0.0, 1.0);
    const Measure leb = Measure::lebesgue();
    CHECK(lipschitz_profile(Kernel::constant(1.5), iv, leb, 1.0, {0.5}).value() ==
          doctest::Approx(0.75).epsilon(1e-12));
    // (int_0^1 (1-s)^(-1/4) ds) = 4/3
    CHECK(lipschitz_profile(Kernel::fractional(0.75, 0.0, 0.0), iv, leb, 1.0, {1.0}).value() ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    CHECK(uniqueness_certificate(Kernel::constant(3.0), iv, leb, 1.0, {{0.5}, {1.0}}) == Uniqueness::Unique);
    const Domain v = Domain::void_set("pair");
    const Measure m = Measure::discrete({{0.0, 1.0}, {1.0, 1.0}});
    CHECK(uniqueness_certificate(Kernel::void_kernel(ScalarFn::constant(0.7)), v, m, 1.0, {{0.0}}) ==
          Uniqueness::Unknown);
}

}
