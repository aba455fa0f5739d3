#include "volres/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "volres/errors.hpp"
#include "volres/quadrature.hpp"
#include "volres/resolvent.hpp"
#include "volres/specfun.hpp"

namespace volres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rootp(double v, double p) {
    if (p == 1.0 || v == 0.0 || v == kInf) return v;
    return std::pow(v, 1.0 / p);
}

bool is_interval_grid(const QuadratureGrid& g) { return g.domain.kind() == Domain::Kind::Interval; }

std::vector<double> step_of(const QuadratureGrid& g, const GridFn& w) {
    if (!is_interval_grid(g) || !g.measure.atomless()) return w;
    std::vector<double> s(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) s[j] = j == 0 ? w[0] : std::max(w[j - 1], w[j]);
    return s;
}

// sum_{i >= n} (1/i!)^(1/p) L^i
double factorial_majorant(double L, int n, double p) {
    if (L == 0.0) return 0.0;
    if (!std::isfinite(L)) return kInf;
    const double ll = std::log(L);
    const SeriesValue s = sum_log_concave([&](int i) { return i * ll - std::lgamma(i + 1.0) / p; }, n, 1e-16);
    if (s.divergent || !s.sum.is_finite()) return kInf;
    return s.sum.value() + s.tail_bound.value();
}

}  // namespace

GridFn distance_profile(const EvolutionOperatorSpec& op, const GridFn& x, const GridFn& y) {
    const QuadratureGrid& g = op.grid;
    const std::size_t M = g.size();
    if (x.size() != M || y.size() != M) throw ConfigError("distance: grid function size mismatch");
    std::vector<double> pt(M);
    for (std::size_t i = 0; i < M; ++i) pt[i] = op.metric ? op.metric(x[i], y[i]) : std::abs(x[i] - y[i]);
    GridFn d(M, 0.0);
    if (is_interval_grid(g)) {
        double run = 0.0;
        for (std::size_t i = 0; i < M; ++i) d[i] = run = std::max(run, pt[i]);
        return d;
    }
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j)
            if (g.related(i, j)) d[i] = std::max(d[i], pt[j]);
    return d;
}

ExtReal lipschitz_profile(const Kernel& lambda, const Domain& domain, const Measure& measure, double p,
                          const Point& t) {
    if (!(p >= 1.0)) throw ConfigError("lipschitz profile: p must be >= 1");
    const Region r = lower_set(domain, t);
    const QuadResult q = integrate(
        [&](const Point& s) {
            const double v = lambda.eval_point(t, s);
            return p == 1.0 ? v : std::pow(v, p);
        },
        r, domain, measure, 1e-12);
    if (!q.value.is_finite() || q.status == QuadStatus::Divergent) return ExtReal::infinity();
    return ExtReal(rootp(q.value.value(), p));
}

Uniqueness uniqueness_certificate(const Kernel& lambda, const Domain& domain, const Measure& measure, double p,
                                  const std::vector<Point>& t_samples, double tol) {
    if (t_samples.empty()) return Uniqueness::Unknown;
    try {
        for (const Point& t : t_samples) {
            const SeriesValue I = series_function_I(lambda, domain, measure, p, t, tol);
            if (!I.converged || !I.sum.is_finite() || !I.tail_bound.is_finite()) return Uniqueness::Unknown;
        }
    } catch (const NumericalFailure&) {
        return Uniqueness::Unknown;
    }
    return Uniqueness::Unique;
}

PicardResult picard_solve(const EvolutionOperatorSpec& op, const GridFn& x0, const PicardOptions& opt) {
    if (!(opt.tol > 0.0)) throw ConfigError("picard: tol must be positive");
    if (opt.max_iter < 1) throw ConfigError("picard: max_iter must be >= 1");
    if (!(op.p >= 1.0)) throw ConfigError("picard: p must be >= 1");
    if (!op.apply) throw ConfigError("picard: operator is missing");
    const QuadratureGrid& g = op.grid;
    const std::size_t M = g.size();
    if (x0.size() != M) throw ConfigError("picard: x0 does not match the grid");

    PicardResult res;
    PicardCertificate& cert = res.cert;
    cert.p = op.p;
    cert.eval = opt.eval;
    if (cert.eval.empty())
        for (std::size_t i = 0; i < M; ++i) cert.eval.push_back(i);
    for (std::size_t e : cert.eval)
        if (e >= M) throw ConfigError("picard: evaluation node out of range");

    GridFn x1 = op.apply(x0);
    if (x1.size() != M) throw ConfigError("picard: operator changed the grid size");
    cert.d0 = distance_profile(op, x0, x1);
    cert.w0 = op.lambda_profile ? op.lambda_profile(x0, x1) : cert.d0;

    const GridSeries unit = grid_step_series(op.lambda_kernel, g, op.p, std::vector<double>(M, 1.0), 1);
    for (std::size_t e : cert.eval)
        if (!std::isfinite(unit.tail[e]) || !std::isfinite(unit.J[0][e]))
            throw NumericalFailure("picard: the resolvent series of lambda is not certified finite at node " +
                                   std::to_string(e));

    const int n_cap = opt.max_iter + 1;
    const GridSeries gs = grid_step_series(op.lambda_kernel, g, op.p, step_of(g, cert.w0), n_cap);
    cert.B.assign(n_cap, std::vector<double>(M, 0.0));
    for (std::size_t i = 0; i < M; ++i) {
        double acc = gs.tail[i];
        for (int n = n_cap; n >= 1; --n) {
            acc += rootp(gs.J[n - 1][i], op.p);
            cert.B[n - 1][i] = acc;
        }
    }
    for (std::size_t e : cert.eval)
        if (!std::isfinite(cert.B[0][e]))
            throw NumericalFailure("picard: the fixed point condition fails (B_1 is infinite at node " +
                                   std::to_string(e) + ")");

    for (std::size_t e : cert.eval) {
        const ExtReal l0 = lipschitz_profile(op.lambda_kernel, g.domain, g.measure, op.p, g.nodes[e]);
        cert.lambda0.push_back(l0.is_finite() ? l0.value() : kInf);
    }
    cert.closed_form = is_interval_grid(g) && g.measure.atomless() && op.lambda_kernel.monotone_declared(g.domain);
    if (cert.closed_form) {
        cert.lambda0_all.resize(M);
        for (std::size_t i = 0; i < M; ++i) {
            const ExtReal l0 = lipschitz_profile(op.lambda_kernel, g.domain, g.measure, op.p, g.nodes[i]);
            cert.lambda0_all[i] = l0.is_finite() ? l0.value() : kInf;
        }
    }

    res.iterates.push_back(x0);
    res.iterates.push_back(std::move(x1));
    int n = 1;
    for (;;) {
        double worst = 0.0;
        for (std::size_t e : cert.eval) worst = std::max(worst, cert.B[n - 1][e]);
        if (worst < opt.tol) {
            cert.converged = true;
            break;
        }
        if (n >= opt.max_iter) break;
        res.iterates.push_back(op.apply(res.iterates.back()));
        ++n;
    }
    cert.iterates = n;
    res.x_hat = res.iterates.back();
    const GridFn d = distance_profile(op, res.x_hat, op.apply(res.x_hat));
    for (double v : d) res.residual = std::max(res.residual, v);
    return res;
}

ErrorBound error_bound(const PicardCertificate& cert, int n, std::size_t i) {
    if (n < 1 || n > static_cast<int>(cert.B.size())) throw std::out_of_range("error_bound: n out of range");
    if (i >= cert.B[n - 1].size()) throw std::out_of_range("error_bound: node out of range");
    ErrorBound out;
    const double b = cert.B[n - 1][i];
    out.table = std::isfinite(b) ? ExtReal(b) : ExtReal::infinity();
    if (cert.closed_form) {
        const double c = cert.d0[i] == 0.0 ? 0.0 : cert.d0[i] * factorial_majorant(cert.lambda0_all[i], n, cert.p);
        out.closed_form = std::isfinite(c) ? ExtReal(c) : ExtReal::infinity();
    }
    return out;
}

CatalogProblem linear_volterra_problem(double lambda, int level) {
    if (!(lambda >= 0.0)) throw ConfigError("linear Volterra: lambda must be >= 0");
    if (level < 1) throw ConfigError("linear Volterra: grid level must be >= 1");
    CatalogProblem pr;
    pr.name = "linear_volterra";
    pr.op.grid = make_grid(Domain::interval(0.0, 1.0), Measure::lebesgue(), level);
    pr.op.lambda_kernel = Kernel::constant(lambda);
    const QuadratureGrid grid = pr.op.grid;
    pr.op.apply = [grid, lambda](const GridFn& u) {
        GridFn c = cumulative_integral(grid, u);
        for (double& v : c) v = 1.0 + lambda * v;
        return c;
    };
    pr.x0.assign(grid.size(), 0.0);
    for (const Point& x : grid.nodes) pr.reference.push_back(std::exp(lambda * x[0]));
    pr.reference_kind = "exact";
    return pr;
}

CatalogProblem abel_problem(double alpha, double lambda, int level) {
    if (!(alpha > 0.0)) throw ConfigError("Abel problem: alpha must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("Abel problem: lambda must be >= 0");
    if (level < 1) throw ConfigError("Abel problem: grid level must be >= 1");
    CatalogProblem pr;
    pr.name = "abel";
    pr.op.grid = make_grid(Domain::interval(0.0, 1.0), Measure::lebesgue(), level);
    pr.op.lambda_kernel = Kernel::fractional(alpha, 0.0, 0.0, lambda / gamma_fn(alpha));
    const std::size_t M = pr.op.grid.size();
    const double h = 1.0 / static_cast<double>(M - 1);
    const double scale = lambda * std::pow(h, alpha) / gamma_fn(alpha + 2.0);
    auto pw = [alpha](double k) { return k <= 0.0 ? 0.0 : std::pow(k, alpha + 1.0); };
    // product trapezoidal weights of int_0^{t_n} (t_n - s)^(alpha-1) u(s) ds / Gamma(alpha)
    std::vector<double> W(M * M, 0.0);
    for (std::size_t n = 1; n < M; ++n) {
        const double dn = static_cast<double>(n);
        W[n * M] = pw(dn - 1.0) - (dn - alpha - 1.0) * std::pow(dn, alpha);
        for (std::size_t j = 1; j < n; ++j) {
            const double k = static_cast<double>(n - j);
            W[n * M + j] = pw(k + 1.0) - 2.0 * pw(k) + pw(k - 1.0);
        }
        W[n * M + n] = 1.0;
        for (std::size_t j = 0; j <= n; ++j) W[n * M + j] *= scale;
    }
    pr.op.apply = [W, M](const GridFn& u) {
        GridFn out(M, 1.0);
        for (std::size_t n = 1; n < M; ++n)
            for (std::size_t j = 0; j <= n; ++j) out[n] += W[n * M + j] * u[j];
        return out;
    };
    pr.x0.assign(M, 0.0);
    pr.reference.assign(M, 1.0);
    for (std::size_t n = 1; n < M; ++n) {
        double acc = 1.0;
        for (std::size_t j = 0; j < n; ++j) acc += W[n * M + j] * pr.reference[j];
        pr.reference[n] = acc / (1.0 - W[n * M + n]);
    }
    pr.reference_kind = "discrete";
    return pr;
}

CatalogProblem banach_problem(double lambda0, double c, double x0) {
    if (!(lambda0 >= 0.0)) throw ConfigError("Banach problem: lambda0 must be >= 0");
    CatalogProblem pr;
    pr.name = "banach";
    pr.op.grid = make_grid(Domain::void_set("point"), Measure::discrete({{0.0, 1.0}}), 1);
    pr.op.lambda_kernel = Kernel::void_kernel(ScalarFn::constant(lambda0));
    pr.op.apply = [lambda0, c](const GridFn& x) { return GridFn{lambda0 * x[0] + c}; };
    pr.x0 = {x0};
    pr.reference = {lambda0 < 1.0 ? c / (1.0 - lambda0) : kInf};
    pr.reference_kind = "exact";
    return pr;
}

}  // namespace volres
