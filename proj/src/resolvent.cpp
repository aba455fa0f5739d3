#include "volres/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "volres/errors.hpp"
#include "volres/io.hpp"
#include "volres/quadrature.hpp"

namespace volres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double powp(double v, double p) {
    if (p == 1.0 || v == 0.0) return v;
    if (v == kInf) return kInf;
    return std::pow(v, p);
}

double rootp(double v, double p) { return powp(v, 1.0 / p); }

double sum_finite(const std::vector<double>& terms) {
    double s = 0.0;
    for (double v : terms) s += v;
    return s;
}

ExtReal ext(double v) { return std::isfinite(v) ? ExtReal(std::max(v, 0.0)) : ExtReal::infinity(); }

using Layers = std::vector<std::vector<double>>;  // [n-1][i * N + j]

double void_q(const Kernel& k, const Domain& d, const Measure& m, double p) {
    std::vector<double> x, w;
    auto f = [&](double r) {
        const double v = k.family() == Kernel::Family::Separable ? xmul(k.k0()(r), k.k1()(r)) : k.k1()(r);
        return powp(v, p);
    };
    if (!m.atomless()) {
        unordered_axis(d, m, x, w);
        double acc = 0.0;
        for (std::size_t l = 0; l < x.size(); ++l) acc += xmul(w[l], f(x[l]));
        return acc;
    }
    const QuadResult q = integrate_1d(f, d.support()->lo, d.support()->hi, m, 1e-13);
    return q.value.value();
}

double k0_of(const Kernel& k, double t) { return k.family() == Kernel::Family::Separable ? k.k0()(t) : 1.0; }

double measure_mass(const Measure& m, double a, double b) {
    if (m.kind() == Measure::Kind::Lebesgue) return b - a;
    if (b <= a) return 0.0;
    return integrate_1d([](double) { return 1.0; }, a, b, m, 1e-13).value.value();
}

Layers interval_layers(const Kernel& kernel, const Measure& measure, double p, int n_max,
                       const std::vector<double>& nodes) {
    const std::size_t M = nodes.size();
    Layers L(n_max, std::vector<double>(M * M, 0.0));
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j <= i; ++j) L[0][i * M + j] = powp(kernel.eval1(nodes[i], nodes[j]), p);
    if (n_max == 1) return L;
    const AxisOperator op = AxisOperator::for_kernel(kernel, p, measure, nodes);
    const Domain dom = Domain::interval(nodes.front(), nodes.back());
    EngineOptions opt;
    opt.level = 6;
    for (std::size_t j = 0; j < M; ++j) {
        if (measure.atomless() && M - 1 - j < 5) {
            // too few nodes above s_j for a full interpolation stencil
            for (std::size_t i = j + 1; i < M; ++i) {
                const PointwiseIterates r =
                    pointwise_iterates(kernel, dom, measure, p, {nodes[i]}, {nodes[j]}, n_max, 1e-12, opt);
                for (int n = 2; n <= n_max; ++n) L[n - 1][i * M + j] = r.terms[n - 1];
            }
            continue;
        }
        const std::vector<double> A = op.column_matrix(j);
        std::vector<double> col(M);
        for (std::size_t i = 0; i < M; ++i) col[i] = L[0][i * M + j];
        for (std::size_t i = 0; i < j; ++i) col[i] = 0.0;
        for (int n = 2; n <= n_max; ++n) {
            col = apply_along_axis(A, {M}, 0, col);
            for (std::size_t i = j; i < M; ++i) L[n - 1][i * M + j] = col[i];
        }
    }
    return L;
}

Layers compute_layers(const Kernel& kernel, const Measure& measure, double p, int n_max, const QuadratureGrid& grid,
                      Regime regime, int family_layers = 20) {
    const std::size_t N = grid.size();
    Layers L(n_max, std::vector<double>(N * N, 0.0));
    auto kp = [&](std::size_t i, std::size_t j) { return powp(kernel.eval_point(grid.nodes[i], grid.nodes[j]), p); };
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            if (grid.related(i, j)) L[0][i * N + j] = kp(i, j);
    if (n_max == 1) return L;

    switch (regime) {
        case Regime::Family: {
            FamilyIterates F(kernel, p, family_layers);
            for (int n = 2; n <= n_max; ++n)
                for (std::size_t i = 0; i < N; ++i)
                    for (std::size_t j = 0; j <= i; ++j)
                        L[n - 1][i * N + j] = F.value(n, grid.nodes[i][0], grid.nodes[j][0]);
            return L;
        }
        case Regime::VoidClosed: {
            const double Q = void_q(kernel, grid.domain, measure, p);
            for (int n = 2; n <= n_max; ++n)
                for (std::size_t i = 0; i < N; ++i)
                    for (std::size_t j = 0; j < N; ++j)
                        L[n - 1][i * N + j] =
                            xmul(powp(xmul(k0_of(kernel, grid.nodes[i][0]), kernel.k1()(grid.nodes[j][0])), p),
                                 std::pow(Q, n - 1));
            return L;
        }
        case Regime::Multiplicative: {
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j <= i; ++j) {
                    const double t = grid.nodes[i][0], s = grid.nodes[j][0];
                    const double e = std::exp(p * kernel.nu_mass(s, t));
                    const double mu = measure_mass(measure, s, t);
                    for (int n = 2; n <= n_max; ++n)
                        L[n - 1][i * N + j] =
                            mu > 0.0 ? e * std::exp((n - 1) * std::log(mu) - std::lgamma(n)) : 0.0;
                }
            return L;
        }
        case Regime::Tensor:
            break;
    }

    const auto axes = split_axes(grid.domain, measure);
    const std::size_t d = grid.domain.ordered_dim();
    std::vector<std::size_t> dims;
    for (const auto& ax : grid.axis_nodes) dims.push_back(ax.size());

    if (grid.domain.kind() == Domain::Kind::Void) {
        std::vector<double> x, w;
        unordered_axis(grid.domain, measure, x, w);
        std::vector<double> A(N * N);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t l = 0; l < N; ++l) A[i * N + l] = xmul(powp(kernel.eval1(x[i], x[l]), p), w[l]);
        for (int n = 2; n <= n_max; ++n) {
            const auto& prev = L[n - 2];
            auto& cur = L[n - 1];
            for (std::size_t j = 0; j < N; ++j) {
                std::vector<double> col(N);
                for (std::size_t l = 0; l < N; ++l) col[l] = prev[l * N + j];
                const std::vector<double> out = apply_along_axis(A, {N}, 0, col);
                for (std::size_t i = 0; i < N; ++i) cur[i * N + j] = out[i];
            }
        }
        return L;
    }

    // interval or box; a box product kernel factorises over the axes
    std::vector<Kernel> factors;
    if (grid.domain.kind() == Domain::Kind::Interval) factors = {kernel};
    else factors = kernel.parts();
    std::vector<Layers> axis_layers;
    for (std::size_t a = 0; a < d; ++a)
        axis_layers.push_back(interval_layers(factors[a], axes[a].measure, p, n_max, grid.axis_nodes[a]));
    if (grid.domain.kind() == Domain::Kind::Interval) {
        for (int n = 2; n <= n_max; ++n) L[n - 1] = axis_layers[0][n - 1];
        return L;
    }
    double Q = 1.0;
    ScalarFn tf = ScalarFn::constant(1.0);
    if (grid.domain.tail()) {
        std::vector<double> x, w;
        unordered_axis(axes[d].domain, axes[d].measure, x, w);
        if (kernel.tail_factor()) tf = *kernel.tail_factor();
        Q = 0.0;
        for (std::size_t l = 0; l < x.size(); ++l) Q += xmul(powp(tf(x[l]), p), w[l]);
    }
    for (std::size_t i = 0; i < N; ++i) {
        const auto idx = grid.unflatten(i);
        for (std::size_t j = 0; j < N; ++j) {
            if (!grid.related(i, j)) continue;
            const auto jdx = grid.unflatten(j);
            double base = grid.domain.tail() ? powp(tf(grid.nodes[j][d]), p) : 1.0;
            for (int n = 2; n <= n_max; ++n) {
                double v = xmul(base, std::pow(Q, n - 1));
                for (std::size_t a = 0; a < d; ++a) {
                    const std::size_t M = dims[a];
                    v = xmul(v, axis_layers[a][n - 1][idx[a] * M + jdx[a]]);
                }
                L[n - 1][i * N + j] = v;
            }
        }
    }
    return L;
}

}  // namespace

// ------------------------------------------------------------- the table

ResolventTable::ResolventTable(QuadratureGrid grid, int n_max, double p)
    : grid_(std::move(grid)), n_max_(n_max), p_(p) {
    const std::size_t N = grid_.size();
    mask_.assign(N * N, 0);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) mask_[i * N + j] = grid_.related(i, j) ? 1 : 0;
    values_.assign(n_max, std::vector<double>(N * N, 0.0));
}

double ResolventTable::value(int n, std::size_t i, std::size_t j) const {
    const std::size_t N = grid_.size();
    if (n < 1 || n > n_max_ || i >= N || j >= N) throw std::out_of_range("resolvent table: index out of range");
    if (!mask_[i * N + j]) throw std::out_of_range("resolvent table: s is not below t");
    return values_[n - 1][i * N + j];
}

void ResolventTable::set(int n, std::size_t i, std::size_t j, double v) {
    const std::size_t N = grid_.size();
    if (std::isnan(v) || v < 0.0) throw NumericalFailure("resolvent table: invalid layer value");
    values_.at(n - 1).at(i * N + j) = v;
}

void ResolventTable::set_err_est(double e) {
    err_est_ = e;
    status_ = std::isfinite(e) ? TableStatus::Ok : TableStatus::UnknownAccuracy;
}

void ResolventTable::write_csv(std::ostream& os) const {
    const std::size_t N = grid_.size();
    const std::size_t dim = grid_.axis_nodes.size();
    if (dim == 1) {
        os << "n,t,s,value\n";
    } else {
        os << "n";
        for (std::size_t a = 0; a < dim; ++a) os << ",t" << a + 1;
        for (std::size_t a = 0; a < dim; ++a) os << ",s" << a + 1;
        os << ",value\n";
    }
    for (int n = 1; n <= n_max_; ++n)
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) {
                if (!mask_[i * N + j]) continue;
                os << n;
                for (double x : grid_.nodes[i]) os << ',' << format_double(x);
                for (double x : grid_.nodes[j]) os << ',' << format_double(x);
                os << ',' << format_double(values_[n - 1][i * N + j]) << '\n';
            }
}

std::string ResolventTable::to_json() const {
    using nlohmann::json;
    const std::size_t N = grid_.size();
    json j;
    j["n_max"] = n_max_;
    j["p"] = p_;
    j["err_est"] = std::isfinite(err_est_) ? json(err_est_) : json("inf");
    j["status"] = status_ == TableStatus::Ok ? "ok" : "unknown_accuracy";
    j["grid"] = {{"level", grid_.level}, {"scheme", grid_.scheme}, {"nodes", grid_.nodes}};
    json entries = json::array();
    for (int n = 1; n <= n_max_; ++n)
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) {
                if (!mask_[i * N + k]) continue;
                const double v = values_[n - 1][i * N + k];
                entries.push_back({{"n", n}, {"i", i}, {"j", k}, {"value", std::isfinite(v) ? json(v) : json("inf")}});
            }
    j["values"] = entries;
    return j.dump(2);
}

ResolventTable iterated_kernels(const Kernel& kernel, const Measure& measure, double p, int n_max,
                                const QuadratureGrid& grid) {
    if (n_max < 1) throw ConfigError("iterated kernels: n_max must be >= 1");
    const Regime regime = classify(kernel, grid.domain, measure, p);
    const std::size_t N = grid.size();
    if (N > 2500) throw ConfigError("iterated kernels: grid too large for a table (lower the grid level)");
    const Layers L = compute_layers(kernel, measure, p, n_max, grid, regime);
    ResolventTable table(grid, n_max, p);
    for (int n = 1; n <= n_max; ++n)
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (table.defined(i, j)) table.set(n, i, j, L[n - 1][i * N + j]);

    double err = 0.0;
    auto compare = [&](const Layers& C, const QuadratureGrid& cg) {
        const std::size_t M = cg.size();
        std::vector<std::size_t> map(M);
        for (std::size_t k = 0; k < M; ++k) {
            const auto f = grid.find(cg.nodes[k]);
            if (!f) throw std::logic_error("coarse grid node missing from fine grid");
            map[k] = *f;
        }
        for (int n = 1; n <= n_max; ++n)
            for (std::size_t a = 0; a < M; ++a)
                for (std::size_t b = 0; b < M; ++b) {
                    if (!cg.related(a, b)) continue;
                    const double x = C[n - 1][a * M + b], y = L[n - 1][map[a] * N + map[b]];
                    if (std::isinf(x) && std::isinf(y)) continue;
                    const double diff = std::abs(x - y);
                    err = std::isnan(diff) ? kInf : std::max(err, diff);
                }
    };
    bool refinable = false;
    for (const auto& am : split_axes(grid.domain, measure))
        if (am.domain.kind() == Domain::Kind::Interval && am.measure.atomless()) refinable = true;
    if (regime == Regime::Family) {
        compare(compute_layers(kernel, measure, p, n_max, grid, regime, 14), grid);
    } else if (regime == Regime::Tensor && refinable) {
        if (grid.level < 2) err = kInf;
        else {
            const QuadratureGrid cg = make_grid(grid.domain, measure, grid.level - 1);
            compare(compute_layers(kernel, measure, p, n_max, cg, regime), cg);
        }
    }
    table.set_err_est(err);
    return table;
}

// -------------------------------------------------------------- series

SeriesValue resolvent_series(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                             const Point& t, const Point& s, double tol, const EngineOptions& opt) {
    const Regime regime = classify(kernel, domain, measure, p);
    SeriesValue out;
    if (regime == Regime::VoidClosed) {
        const double Q = void_q(kernel, domain, measure, p);
        const double a = powp(xmul(k0_of(kernel, t[0]), kernel.k1()(s[0])), p);
        out.terms_used = 1;
        if (a == 0.0) {
            out.converged = true;
        } else if (Q < 1.0 && std::isfinite(a)) {
            out.sum = ExtReal(a / (1.0 - Q));
            out.converged = true;
        } else {
            out.sum = ExtReal::infinity();
            out.tail_bound = ExtReal::infinity();
            out.divergent = true;
        }
        return out;
    }
    if (regime == Regime::Multiplicative) {
        if (!domain.leq(s, t)) throw std::domain_error("resolvent needs s <= t");
        const double v = std::exp(p * kernel.nu_mass(s[0], t[0]) + measure_mass(measure, s[0], t[0]));
        out.sum = ext(v);
        out.converged = std::isfinite(v);
        out.divergent = !std::isfinite(v);
        out.terms_used = 1;
        return out;
    }
    const PointwiseIterates r = pointwise_iterates(kernel, domain, measure, p, t, s, -1, tol, opt);
    const double sum = sum_finite(r.terms);
    out.terms_used = static_cast<int>(r.terms.size());
    out.sum = r.divergent ? ExtReal::infinity() : ext(sum);
    out.tail_bound = ext(r.tail);
    out.divergent = r.divergent;
    out.converged = !r.divergent && r.tail_known && std::isfinite(sum) && r.tail <= tol * std::max(1.0, sum);
    return out;
}

SeriesValue series_function_I(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                              const Point& t, double tol, const EngineOptions& opt) {
    return lower_set_series(kernel, domain, measure, p, t, Weight{}, tol, -1, opt).series;
}

double volterra_residual(const Kernel& kernel, const Domain& domain, const Measure& measure, const Point& t,
                         const Point& s, int level, int n_max) {
    EngineOptions opt;
    opt.level = level;
    opt.box_level = std::max(1, level - 2);
    const Regime regime = classify(kernel, domain, measure, 1.0);
    auto R = [&](const Point& a, const Point& b) -> double {
        if (n_max > 0 || regime == Regime::Tensor || regime == Regime::Family) {
            if (n_max <= 0) return resolvent_series(kernel, domain, measure, 1.0, a, b, 1e-14, opt).sum.value();
            const PointwiseIterates r = pointwise_iterates(kernel, domain, measure, 1.0, a, b, n_max, 1e-14, opt);
            return sum_finite(r.terms);
        }
        return resolvent_series(kernel, domain, measure, 1.0, a, b, 1e-14, opt).sum.value();
    };
    const double lhs = R(t, s);
    auto integrand = [&](const Point& r) { return xmul(kernel.eval_point(t, r), R(r, s)); };
    double integral;
    if (domain.kind() == Domain::Kind::Void) {
        if (!measure.atomless()) {
            integral = 0.0;
            for (const auto& a : measure.atoms()) integral += xmul(a.mass, integrand({a.point}));
        } else {
            integral = integrate_1d([&](double r) { return integrand({r}); }, domain.support()->lo,
                                    domain.support()->hi, measure, 1e-12)
                           .value.value();
        }
    } else if (domain.kind() == Domain::Kind::Interval) {
        if (t[0] <= s[0] && measure.atomless()) integral = 0.0;
        else
            integral = integrate_1d([&](double r) { return integrand({r}); }, s[0], t[0], measure, 1e-11).value.value();
    } else {
        integral = integrate(integrand, order_interval(domain, s, t), domain, measure, 1e-9).value.value();
    }
    const double rhs = kernel.eval_point(t, s) + integral;
    if (std::isinf(lhs) && std::isinf(rhs)) return 0.0;
    return std::abs(lhs - rhs);
}

// --------------------------------------------------------- decompositions

std::map<std::vector<int>, double> sum_decomposition(const std::vector<Kernel>& parts, const Domain& domain,
                                                     const Measure& measure, int n, double t, double s, int level,
                                                     std::size_t budget) {
    if (parts.empty()) throw ConfigError("sum decomposition: no parts");
    if (n < 1) throw ConfigError("sum decomposition: n must be >= 1");
    if (domain.kind() != Domain::Kind::Interval) throw ConfigError("sum decomposition: interval domains only");
    if (!(s <= t) || !domain.contains({t}) || !domain.contains({s}))
        throw ConfigError("sum decomposition: need s <= t in the domain");
    const std::size_t N = parts.size();
    double count = std::pow(static_cast<double>(N), n);
    if (count > static_cast<double>(budget))
        throw ConfigError("sum decomposition: " + std::to_string(N) + "^" + std::to_string(n) +
                          " components exceed the budget of " + std::to_string(budget));
    const Kernel sum = Kernel::sum(parts);
    sum.validate_domain(domain);
    measure.validate(domain);
    std::map<std::vector<int>, double> out;

    const bool fractional = std::all_of(parts.begin(), parts.end(), [&](const Kernel& k) {
        return k.family() == Kernel::Family::Fractional && k.t0() == parts[0].t0();
    });
    if (fractional) {
        if (measure.kind() != Measure::Kind::Lebesgue)
            throw ConfigError("fractional kernels are supported with Lebesgue measure only");
        std::vector<double> a, b, w;
        for (const auto& k : parts) {
            a.push_back(k.alpha());
            b.push_back(k.beta());
            w.push_back(k.coef() > 0.0 ? std::log(k.coef()) : -kInf);
        }
        FractionalFamily fam(a, b, w, budget);
        const double x = t - s, y = s - parts[0].t0();
        for (std::size_t idx = 0; idx < fam.components(n); ++idx) {
            double v;
            if (y <= 0.0) v = kInf;
            else if (x <= 0.0) v = n == 1 ? sum.eval1(t, s) : 0.0;
            else v = fam.component(n, idx, x, y);
            out[fam.multi_index(n, idx)] = v;
        }
        return out;
    }

    const std::vector<double> nodes = interval_nodes(measure, s, t, level);
    const std::size_t M = nodes.size(), last = M - 1;
    std::vector<std::vector<double>> mats;
    for (const auto& k : parts) mats.push_back(AxisOperator::for_kernel(k, 1.0, measure, nodes).column_matrix(0));
    std::vector<std::pair<std::vector<int>, std::vector<double>>> level_vecs;
    for (std::size_t j = 0; j < N; ++j) {
        std::vector<double> r(M);
        for (std::size_t i = 0; i < M; ++i) r[i] = parts[j].eval1(nodes[i], s);
        level_vecs.push_back({{static_cast<int>(j + 1)}, r});
    }
    for (int m = 2; m <= n; ++m) {
        std::vector<std::pair<std::vector<int>, std::vector<double>>> next;
        for (const auto& [key, r] : level_vecs)
            for (std::size_t j = 0; j < N; ++j) {
                std::vector<int> k2 = key;
                k2.push_back(static_cast<int>(j + 1));
                next.push_back({k2, apply_along_axis(mats[j], {M}, 0, r)});
            }
        level_vecs = std::move(next);
    }
    for (const auto& [key, r] : level_vecs) out[key] = r[last];
    return out;
}

ExtReal product_bound(const std::vector<AxisFactor>& factors, double p, int n, const Point& t, const Point& s) {
    if (factors.empty() || t.size() != factors.size() || s.size() != factors.size())
        throw ConfigError("product bound: axis count mismatch");
    if (n < 1) throw ConfigError("product bound: n must be >= 1");
    double acc = 1.0;
    for (std::size_t a = 0; a < factors.size(); ++a) {
        const auto& f = factors[a];
        if (f.domain.kind() != Domain::Kind::Interval) throw ConfigError("product bound: factors must be intervals");
        const PointwiseIterates r =
            pointwise_iterates(f.kernel, f.domain, f.measure, p, {t[a]}, {s[a]}, n, 1e-12);
        acc = xmul(acc, r.terms[n - 1]);
    }
    return ext(acc);
}

ExtReal product_series_bound(const std::vector<AxisFactor>& factors, double p, const Point& t, double tol) {
    if (factors.empty() || t.size() != factors.size()) throw ConfigError("product bound: axis count mismatch");
    double acc = 1.0;
    for (std::size_t a = 0; a < factors.size(); ++a) {
        const SeriesValue v = series_function_I(factors[a].kernel, factors[a].domain, factors[a].measure, p, {t[a]}, tol);
        acc = xmul(acc, (v.sum + v.tail_bound).value());
    }
    return ext(acc);
}

double fractional_lp_constant(const std::vector<double>& alpha, const std::vector<double>& beta, double p) {
    if (alpha.size() != beta.size() || alpha.empty()) throw ConfigError("fractional constant: size mismatch");
    double c = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const FractionalResolventParams fp{alpha[i], beta[i], p};
        fp.validate();
        c *= rootp(fp.c_hat_max(), p);
    }
    return c;
}

}  // namespace volres
