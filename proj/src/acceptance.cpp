#include "volres/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "volres/fixpoint.hpp"
#include "volres/fractional.hpp"
#include "volres/gronwall.hpp"
#include "volres/quadrature.hpp"
#include "volres/resolvent.hpp"
#include "volres/specfun.hpp"
#include "volres/volterra_weights.hpp"

namespace volres {

namespace {

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt2(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Direct summation of sum_{n>=0} z^n / Gamma(a n + b)^(1/p) with the C library gamma.
double ml_direct(double a, double b, double p, double z) {
    double sum = 0.0;
    for (int n = 0; n < 5000; ++n) {
        const double arg = a * n + b;
        if (arg <= 0.0) continue;
        const double lt = (n == 0 ? 0.0 : n * std::log(z)) - std::lgamma(arg) / p;
        const double t = std::exp(lt);
        sum += t;
        if (n > 5 && t < 1e-18 * sum && arg > 2.0 && n * std::log(std::max(z, 1e-300)) < std::lgamma(arg) / p) break;
    }
    return sum;
}

// sum_{n>=1} (K^n / n!)^(1/p)
double factorial_direct(double K, double p) {
    double s = 0.0;
    for (int n = 1; n < 2000; ++n) {
        const double t = std::pow(std::exp(n * std::log(K) - std::lgamma(n + 1.0)), 1.0 / p);
        s += t;
        if (n > K + 5 && t < 1e-18 * s) break;
    }
    return s;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r * n + c]) > std::abs(A[piv * n + c])) piv = r;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(A[c * n + k], A[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = A[r * n + c] / A[c * n + c];
            for (std::size_t k = c; k < n; ++k) A[r * n + k] -= f * A[c * n + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t k = r + 1; k < n; ++k) acc -= A[r * n + k] * x[k];
        x[r] = acc / A[r * n + r];
    }
    return x;
}

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

CriterionResult c1_iterated_kernels() {
    CriterionResult r{1, "iterated-kernel oracle", false, "", 0.0};
    const auto t0 = Clock::now();
    const double c = 1.5;
    const QuadratureGrid g = make_grid(Domain::interval(0.0, 1.0), Measure::lebesgue(), 6);
    const ResolventTable tab = iterated_kernels(Kernel::constant(c), Measure::lebesgue(), 1.0, 6, g);
    const std::pair<int, int> pairs[] = {{64, 0},  {64, 32}, {50, 10}, {40, 39}, {33, 1},
                                         {20, 5},  {63, 62}, {10, 0},  {48, 16}, {60, 30}};
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n)
        for (auto [i, j] : pairs) {
            const double d = g.nodes[i][0] - g.nodes[j][0];
            const double exact = std::pow(c, n) * std::pow(d, n - 1) / std::tgamma(n);
            worst = std::max(worst, rel(tab.value(n, i, j), exact));
        }
    r.seconds = since(t0);
    r.pass = worst <= 1e-6 && r.seconds < 10.0;
    r.detail = fmt("max rel err %.2e over n<=6 at 10 pairs", worst);
    return r;
}

CriterionResult c2_fractional() {
    CriterionResult r{2, "fractional closed form", false, "", 0.0};
    const auto t0 = Clock::now();
    const FractionalResolventParams fp{0.75, 0.0, 1.0};
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n)
        for (double x : {0.01, 0.1, 0.5, 1.0, 2.0, 7.5})
            for (double y : {0.05, 1.0, 3.0}) {
                const double a = 0.75;
                const double exact = std::exp(n * std::lgamma(a) - std::lgamma(a * n) + (a * n - 1.0) * std::log(x));
                worst = std::max(worst, rel(fractional_f(fp, n, x, y), exact));
            }
    const FractionalResolventParams fb{0.75, 0.1, 1.0};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lu(std::log(1e-2), std::log(1e2));
    std::uniform_int_distribution<int> un(1, 6);
    int viol = 0;
    for (int k = 0; k < 20; ++k) {
        const int n = un(rng);
        const double x = std::exp(lu(rng)), y = std::exp(lu(rng));
        if (fractional_f(fb, n, x, y) > fractional_f_bound(fb, n, x, y) * (1.0 + 1e-10)) ++viol;
    }
    r.seconds = since(t0);
    r.pass = worst <= 1e-10 && viol == 0;
    r.detail = fmt2("beta=0 max rel err %.2e; beta=0.1 bound violations %.0f/20", worst, viol);
    return r;
}

CriterionResult c3_mittag_leffler(std::uint64_t seed) {
    CriterionResult r{3, "mittag-leffler", false, "", 0.0};
    const auto t0 = Clock::now();
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double z = 0.1 * k;
        e1 = std::max(e1, rel(mittag_leffler({1.0, 1.0, 1.0}, z, 1e-16).sum.value(), std::exp(z)));
    }
    for (int k = 1; k <= 50; ++k) {
        const double x = 0.1 * k;
        e2 = std::max(e2, rel(mittag_leffler({2.0, 1.0, 1.0}, x * x, 1e-16).sum.value(), std::cosh(x)));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ua(0.2, 3.0), ub(0.1, 3.0), up(1.0, 3.0), uz(0.0, 8.0);
    for (int k = 0; k < 20; ++k) {
        const double a = ua(rng), b = ub(rng), p = up(rng), z = uz(rng);
        e3 = std::max(e3, rel(mittag_leffler({a, b, p}, z, 1e-16).sum.value(), ml_direct(a, b, p, z)));
    }
    r.seconds = since(t0);
    r.pass = e1 <= 1e-12 && e2 <= 1e-10 && e3 <= 1e-10;
    char buf[200];
    std::snprintf(buf, sizeof buf, "exp %.2e, cosh %.2e, random vs direct sum %.2e", e1, e2, e3);
    r.detail = buf;
    return r;
}

CriterionResult c4_volterra_identity() {
    CriterionResult r{4, "volterra identity", false, "", 0.0};
    const auto t0 = Clock::now();
    const Domain iv = Domain::interval(0.0, 1.0);
    double worst = 0.0;
    const std::pair<double, double> pts[] = {{1.0, 0.0}, {0.7, 0.2}, {0.5, 0.125}, {0.9, 0.6}};
    for (auto [t, s] : pts)
        worst = std::max(worst, volterra_residual(Kernel::constant(1.5), iv, Measure::lebesgue(), {t}, {s}, 6));
    const Domain vs = Domain::void_set("pair");
    const Measure vm = Measure::discrete({{0.0, 0.5}, {1.0, 0.5}});
    const double vres = volterra_residual(Kernel::void_kernel(ScalarFn::constant(0.5)), vs, vm, {0.0}, {1.0}, 6);
    r.seconds = since(t0);
    r.pass = worst < 1e-6 && vres < 1e-12;
    r.detail = fmt2("constant kernel residual %.2e; void q=0.5 residual %.2e", worst, vres);
    return r;
}

CriterionResult c5_series_function() {
    CriterionResult r{5, "series function", false, "", 0.0};
    const auto t0 = Clock::now();
    const Domain iv = Domain::interval(0.0, 1.0);
    const Measure leb = Measure::lebesgue();
    double e_reg = 0.0, e_void = 0.0, e_frac = 0.0;
    const Kernel reg = Kernel::separable(ScalarFn::constant(1.0), ScalarFn::linear(1.0, 0.5));
    for (double p : {1.0, 2.0}) {
        const double K = p == 1.0 ? 1.25 : 1.0 + 0.5 + 0.25 / 3.0;
        const double I = series_function_I(reg, iv, leb, p, {1.0}, 1e-13).sum.value();
        e_reg = std::max(e_reg, rel(I, factorial_direct(K, p)));

        const Domain vs = Domain::void_set("pair");
        const Measure vm = Measure::discrete({{0.0, 0.5}, {1.0, 0.5}});
        const double q = std::pow(0.6, p);
        const double Iv = series_function_I(Kernel::void_kernel(ScalarFn::constant(0.6)), vs, vm, p, {0.0}, 1e-13)
                              .sum.value();
        const double rq = std::pow(q, 1.0 / p);
        e_void = std::max(e_void, rel(Iv, rq / (1.0 - rq)));
    }
    const std::pair<double, double> fr[] = {{0.75, 1.0}, {0.8, 2.0}};
    for (auto [alpha, p] : fr) {
        const double a = (alpha - 1.0) * p + 1.0;
        const double I = series_function_I(Kernel::fractional(alpha, 0.0, 0.0), iv, leb, p, {1.0}, 1e-13).sum.value();
        const double z = std::pow(std::tgamma(a), 1.0 / p);
        e_frac = std::max(e_frac, rel(I, ml_direct(a, 1.0, p, z) - 1.0));
    }
    r.seconds = since(t0);
    r.pass = e_reg <= 1e-8 && e_void <= 1e-15 && e_frac <= 1e-8;
    char buf[200];
    std::snprintf(buf, sizeof buf, "regular %.2e, void %.2e, fractional %.2e", e_reg, e_void, e_frac);
    r.detail = buf;
    return r;
}

CriterionResult c6_gronwall_sharpness() {
    CriterionResult r{6, "gronwall sharpness m=1", false, "", 0.0};
    const auto t0 = Clock::now();
    const CatalogProblem pr = linear_volterra_problem(1.0, 7);
    PicardOptions po;
    po.tol = 1e-11;
    po.max_iter = 60;
    const PicardResult sol = picard_solve(pr.op, pr.x0, po);
    GronwallInput in;
    in.k = Kernel::separable(ScalarFn::constant(1.0), ScalarFn::constant(1.0));
    in.v0 = [](const Point&) { return 1.0; };
    double e_sharp = 0.0, e_sup = 0.0;
    const std::size_t M = pr.op.grid.size();
    for (int k = 1; k <= 20; ++k) {
        const std::size_t i = (M - 1) * k / 20;
        const Point t = pr.op.grid.nodes[i];
        const BoundPoint b = gronwall_bound(in, t);
        e_sharp = std::max(e_sharp, std::abs(b.sharp.value() - sol.x_hat[i]));
        e_sup = std::max(e_sup, std::abs(b.sup.value() - std::exp(t[0])));
    }
    r.seconds = since(t0);
    r.pass = sol.cert.converged && e_sharp <= 1e-5 && e_sup <= 1e-6;
    r.detail = fmt2("sharp vs solver %.2e; sup form vs e^t %.2e", e_sharp, e_sup);
    return r;
}

CriterionResult c7_fredholm() {
    CriterionResult r{7, "fredholm sharpness m=0", false, "", 0.0};
    const auto t0 = Clock::now();
    std::vector<Atom> atoms;
    std::vector<double> k1(10);
    double raw = 0.0;
    for (int j = 0; j < 10; ++j) {
        atoms.push_back({static_cast<double>(j), 0.05 + 0.01 * j});
        k1[j] = 0.5 + j / 9.0;
        raw += k1[j] * atoms[j].mass;
    }
    for (double& v : k1) v *= 0.4 / raw;
    const std::vector<double> kk = k1;
    GronwallInput in;
    in.domain = Domain::void_set("atoms");
    in.measure = Measure::discrete(atoms);
    in.k = Kernel::void_kernel(ScalarFn::custom([kk](double s) {
        const auto j = static_cast<std::size_t>(std::lround(s));
        return j < kk.size() ? kk[j] : 0.0;
    }));
    auto v = [](double s) { return 1.0 + 0.25 * std::sin(s); };
    in.v0 = [v](const Point& x) { return v(x[0]); };
    std::vector<double> A(100), b(10);
    for (int i = 0; i < 10; ++i) {
        b[i] = v(i);
        for (int j = 0; j < 10; ++j) A[i * 10 + j] = (i == j ? 1.0 : 0.0) - k1[j] * atoms[j].mass;
    }
    const std::vector<double> u = solve_dense(A, b);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) worst = std::max(worst, rel(gronwall_bound(in, {double(i)}).sharp.value(), u[i]));
    r.seconds = since(t0);
    r.pass = worst <= 1e-10;
    r.detail = fmt("max rel diff to the linear solve %.2e", worst);
    return r;
}

CriterionResult c8_picard() {
    CriterionResult r{8, "picard certificate", false, "", 0.0};
    const auto t0 = Clock::now();
    const CatalogProblem pr = linear_volterra_problem(2.0, 7);
    PicardOptions po;
    po.tol = 1e-6;
    po.max_iter = 25;
    const PicardResult sol = picard_solve(pr.op, pr.x0, po);
    const std::size_t last = pr.op.grid.size() - 1;
    int viol = 0;
    bool decreasing = true;
    double prev = INFINITY, slack = INFINITY;
    for (int n = 1; n <= std::min(10, sol.cert.iterates); ++n) {
        double err = 0.0;
        for (std::size_t i = 0; i <= last; ++i) err = std::max(err, std::abs(sol.iterates[n][i] - pr.reference[i]));
        const double B = error_bound(sol.cert, n, last).table.value();
        if (err > B + 1e-5) ++viol;
        slack = std::min(slack, B + 1e-5 - err);
        if (!(B < prev)) decreasing = false;
        prev = B;
    }
    r.seconds = since(t0);
    r.pass = viol == 0 && decreasing && sol.cert.converged && sol.cert.iterates <= 25 && r.seconds < 5.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "violations %d, B_n decreasing %s, converged in %d iterations, min slack %.2e",
                  viol, decreasing ? "yes" : "no", sol.cert.iterates, slack);
    r.detail = buf;
    return r;
}

CriterionResult c9_banach() {
    CriterionResult r{9, "banach reduction", false, "", 0.0};
    const auto t0 = Clock::now();
    const double l0 = 0.5;
    const CatalogProblem pr = banach_problem(l0, 1.0, 0.0);
    PicardOptions po;
    po.tol = 1e-12;
    po.max_iter = 60;
    const PicardResult sol = picard_solve(pr.op, pr.x0, po);
    const double d = std::abs(pr.x0[0] - pr.op.apply(pr.x0)[0]);
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n)
        worst = std::max(worst, rel(error_bound(sol.cert, n, 0).table.value(), d * std::pow(l0, n) / (1.0 - l0)));
    r.seconds = since(t0);
    r.pass = worst <= 1e-12 && sol.cert.converged;
    r.detail = fmt2("max rel diff to the geometric bound %.2e; fixed point %.12f", worst, sol.x_hat[0]);
    return r;
}

CriterionResult c10_product() {
    CriterionResult r{10, "product kernels", false, "", 0.0};
    const auto t0 = Clock::now();
    const double c1 = 1.5, c2 = 0.8;
    const Domain box = Domain::box({{0.0, 1.0}, {0.0, 1.0}});
    const Measure pm = Measure::product({Measure::lebesgue(), Measure::lebesgue()});
    const Kernel k = Kernel::product({Kernel::constant(c1), Kernel::constant(c2)});
    const Domain iv = Domain::interval(0.0, 1.0);
    const std::pair<Point, Point> pts[] = {
        {{1.0, 0.9}, {0.2, 0.1}}, {{0.5, 0.7}, {0.0, 0.3}}, {{0.8, 1.0}, {0.3, 0.0}}, {{0.6, 0.4}, {0.1, 0.1}}};
    double worst = 0.0, worst_exact = 0.0;
    for (const auto& [t, s] : pts) {
        const PointwiseIterates bx = pointwise_iterates(k, box, pm, 1.0, t, s, 4, 1e-12);
        const PointwiseIterates a1 =
            pointwise_iterates(Kernel::constant(c1), iv, Measure::lebesgue(), 1.0, {t[0]}, {s[0]}, 4, 1e-12);
        const PointwiseIterates a2 =
            pointwise_iterates(Kernel::constant(c2), iv, Measure::lebesgue(), 1.0, {t[1]}, {s[1]}, 4, 1e-12);
        for (int n = 1; n <= 4; ++n) {
            const double prod = a1.terms[n - 1] * a2.terms[n - 1];
            const double d1 = t[0] - s[0], d2 = t[1] - s[1];
            const double f = std::tgamma(n);
            const double exact = std::pow(c1, n) * std::pow(d1, n - 1) / f * std::pow(c2, n) * std::pow(d2, n - 1) / f;
            const double scale = std::max(1e-300, std::abs(prod));
            worst = std::max(worst, std::abs(bx.terms[n - 1] - prod) / scale);
            worst_exact = std::max(worst_exact, std::abs(bx.terms[n - 1] - exact) / std::max(1e-300, exact));
        }
    }
    r.seconds = since(t0);
    r.pass = worst <= 1e-6 && worst_exact <= 1e-6;
    r.detail = fmt2("box vs product of axes %.2e; vs closed form %.2e", worst, worst_exact);
    return r;
}

// Random separable kernel on [0, 1]; increasing k0 when `increasing`.
Kernel random_kernel(std::mt19937_64& rng, bool increasing) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick0 = [&]() {
        const int kind = static_cast<int>(u(rng) * 3.0);
        if (kind == 0) return ScalarFn::constant(0.2 + u(rng));
        if (kind == 1) return ScalarFn::linear(0.2 + u(rng), (increasing ? 1.0 : 2.0 * u(rng) - 0.5) * u(rng));
        return ScalarFn::exp(0.2 + u(rng), increasing ? u(rng) : 2.0 * u(rng) - 1.0);
    };
    auto pick1 = [&]() {
        const int kind = static_cast<int>(u(rng) * 3.0);
        if (kind == 0) return ScalarFn::constant(0.2 + u(rng));
        if (kind == 1) {
            const double a = 0.2 + u(rng);
            return ScalarFn::linear(a, (1.5 * u(rng) - 0.5) * a);
        }
        return ScalarFn::exp(0.2 + u(rng), 2.0 * u(rng) - 1.0);
    };
    return Kernel::separable(pick0(), pick1());
}

CriterionResult c11_invariants(std::uint64_t seed) {
    CriterionResult r{11, "invariant suites", false, "", 0.0};
    const auto t0 = Clock::now();
    const Domain iv = Domain::interval(0.0, 1.0);
    const Measure leb = Measure::lebesgue();
    EngineOptions opt;
    opt.level = 5;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> un(1, 4);
    auto R = [&](const Kernel& k, int n, double t, double s) {
        return pointwise_iterates(k, iv, leb, 1.0, {t}, {s}, n, 1e-13, opt).terms[n - 1];
    };
    auto ordered_pair = [&]() {
        double a = u(rng), b = u(rng);
        if (a < b) std::swap(a, b);
        return std::make_pair(a, b);
    };
    const int N = 100;
    int v_super = 0, v_mono = 0, v_semi = 0, v_inherit = 0;
    double semi_err = 0.0;
    for (int i = 0; i < N; ++i) {
        const Kernel k = random_kernel(rng, false), l = random_kernel(rng, false);
        const auto [t, s] = ordered_pair();
        const int n = un(rng);
        const double rk = R(k, n, t, s), rl = R(l, n, t, s), rs = R(Kernel::sum({k, l}), n, t, s);
        if (rs < (rk + rl) * (1.0 - 1e-9)) ++v_super;
    }
    for (int i = 0; i < N; ++i) {
        const Kernel k = random_kernel(rng, false), extra = random_kernel(rng, false);
        const Kernel l = Kernel::sum({k, extra});
        const auto [t, s] = ordered_pair();
        const int n = un(rng);
        if (R(k, n, t, s) > R(l, n, t, s) * (1.0 + 1e-9)) ++v_mono;
    }
    for (int i = 0; i < N; ++i) {
        const Kernel k = random_kernel(rng, false);
        const auto [t, s] = ordered_pair();
        const int n = 1 + static_cast<int>(u(rng) * 2.0), m = 1 + static_cast<int>(u(rng) * 2.0);
        const double lhs = R(k, n + m, t, s);
        const Rule& gl = gauss_legendre(24);
        double rhs = 0.0;
        for (std::size_t g = 0; g < gl.size(); ++g) {
            const double x = 0.5 * (t + s) + 0.5 * (t - s) * gl.x[g];
            rhs += 0.5 * (t - s) * gl.w[g] * R(k, n, t, x) * R(k, m, x, s);
        }
        semi_err = std::max(semi_err, std::abs(lhs - rhs) / std::max(1.0, lhs));
        if (std::abs(lhs - rhs) > 1e-7 * std::max(1.0, lhs)) ++v_semi;
    }
    for (int i = 0; i < N; ++i) {
        const Kernel k = random_kernel(rng, true);
        double a = u(rng), b = u(rng), c = u(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const int n = un(rng);
        if (R(k, n, b, a) > R(k, n, c, a) * (1.0 + 1e-9) + 1e-14) ++v_inherit;
    }
    r.seconds = since(t0);
    r.pass = v_super == 0 && v_mono == 0 && v_semi == 0 && v_inherit == 0;
    char buf[260];
    std::snprintf(buf, sizeof buf,
                  "violations: superadditivity %d/%d, monotone dependence %d/%d, semigroup %d/%d, "
                  "monotonicity inheritance %d/%d; semigroup max err %.1e",
                  v_super, N, v_mono, N, v_semi, N, v_inherit, N, semi_err);
    r.detail = buf;
    return r;
}

template <class F>
CriterionResult guarded(int id, const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        CriterionResult r{id, name, false, "", 0.0};
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
        return r;
    }
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::uint64_t seed) {
    std::vector<CriterionResult> out;
    out.push_back(guarded(1, "iterated-kernel oracle", c1_iterated_kernels));
    out.push_back(guarded(2, "fractional closed form", c2_fractional));
    out.push_back(guarded(3, "mittag-leffler", [&] { return c3_mittag_leffler(seed); }));
    out.push_back(guarded(4, "volterra identity", c4_volterra_identity));
    out.push_back(guarded(5, "series function", c5_series_function));
    out.push_back(guarded(6, "gronwall sharpness m=1", c6_gronwall_sharpness));
    out.push_back(guarded(7, "fredholm sharpness m=0", c7_fredholm));
    out.push_back(guarded(8, "picard certificate", c8_picard));
    out.push_back(guarded(9, "banach reduction", c9_banach));
    out.push_back(guarded(10, "product kernels", c10_product));
    out.push_back(guarded(11, "invariant suites", [&] { return c11_invariants(seed); }));
    return out;
}

void print_acceptance(std::ostream& os, const std::vector<CriterionResult>& results) {
    for (const auto& r : results) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "  (%.2f s)", r.seconds);
        os << (r.pass ? "PASS" : "FAIL") << "  " << r.id << "  " << r.name << "  " << r.detail << buf << '\n';
    }
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
}

}  // namespace volres
