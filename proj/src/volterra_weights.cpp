#include "volres/volterra_weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "volres/errors.hpp"
#include "volres/quadrature.hpp"

namespace volres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-12;

double powp(double v, double p) {
    if (p == 1.0 || v == 0.0) return v;
    if (v == kInf) return kInf;
    return std::pow(v, p);
}

double rootp(double v, double p) { return powp(v, 1.0 / p); }

bool same_point(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

// Row i of a dense matrix times x; +inf wherever a nonzero weight meets an
// infinite entry, clamped at 0 from below.
double row_dot(const double* row, const std::vector<double>& x) {
    double acc = 0.0;
    bool inf = false;
    for (std::size_t l = 0; l < x.size(); ++l) {
        if (row[l] == 0.0) continue;
        if (x[l] == kInf) {
            inf = true;
            continue;
        }
        acc += row[l] * x[l];
    }
    if (inf) return kInf;
    return acc > 0.0 ? acc : 0.0;
}

std::vector<double> matvec(const std::vector<double>& A, const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = row_dot(&A[i * n], x);
    return y;
}

std::vector<double> uniform_nodes(double lo, double hi, int cells) {
    std::vector<double> x(cells + 1);
    for (int i = 0; i <= cells; ++i) x[i] = lo + (hi - lo) * i / cells;
    x[cells] = hi;
    return x;
}

std::vector<double> atoms_in(const Measure& m, double lo, double hi) {
    std::vector<double> x;
    for (const auto& a : m.atoms())
        if (a.point >= lo && a.point <= hi) x.push_back(a.point);
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    return x;
}

}  // namespace

void unordered_axis(const Domain& d, const Measure& m, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    if (!m.atomless()) {
        for (double a : atoms_in(m, -kInf, kInf)) {
            double mass = 0.0;
            for (const auto& at : m.atoms())
                if (at.point == a) mass += at.mass;
            x.push_back(a);
            w.push_back(mass);
        }
        return;
    }
    const std::optional<Interval> sup = d.kind() == Domain::Kind::Void ? d.support() : d.tail();
    if (!sup) throw ConfigError("continuous measure on an unordered axis needs a support interval");
    const Rule& g = gauss_legendre(kTailNodes);
    const double h = 0.5 * (sup->hi - sup->lo), c = 0.5 * (sup->hi + sup->lo);
    for (std::size_t k = 0; k < g.size(); ++k) {
        x.push_back(c + h * g.x[k]);
        w.push_back(h * g.w[k] * m.density(c + h * g.x[k]));
    }
}

namespace {

double unordered_mass(const Domain& d, const Measure& m, const std::function<double(double)>& f) {
    std::vector<double> x, w;
    if (!m.atomless()) {
        unordered_axis(d, m, x, w);
        double acc = 0.0;
        for (std::size_t l = 0; l < x.size(); ++l) acc += xmul(w[l], f(x[l]));
        return acc;
    }
    const std::optional<Interval> sup = d.kind() == Domain::Kind::Void ? d.support() : d.tail();
    if (!sup) throw ConfigError("continuous measure on an unordered axis needs a support interval");
    const QuadResult q = integrate_1d(f, sup->lo, sup->hi, m, kQuadTol);
    return q.value.is_finite() ? q.value.value() : kInf;
}

double integral_1d(const std::function<double(double)>& f, double a, double b, const Measure& m) {
    if (b <= a) return m.atomless() ? 0.0 : [&] {
        double acc = 0.0;
        for (const auto& at : m.atoms())
            if (same_point(at.point, a)) acc += xmul(at.mass, f(at.point));
        return acc;
    }();
    const QuadResult q = integrate_1d(f, a, b, m, kQuadTol);
    return q.value.is_finite() ? q.value.value() : kInf;
}

// sum_{m >= 1} (K^m / (m!)^d)^(1/p)
double factorial_series(double K, int d, double p) {
    if (K <= 0.0) return 0.0;
    if (K == kInf) return kInf;
    if (d == 0) {
        const double r = rootp(K, p);
        return r < 1.0 ? r / (1.0 - r) : kInf;
    }
    const double lk = std::log(K);
    const SeriesValue s =
        sum_log_concave([&](int m) { return (m * lk - d * std::lgamma(m + 1.0)) / p; }, 1, 1e-17);
    if (s.divergent || !s.sum.is_finite()) return kInf;
    return s.sum.value() + s.tail_bound.value();
}

// sum_{m >= 0} (H^m / m!)^(1/p)
double exp_series(double H, double p) { return 1.0 + factorial_series(H, 1, p); }

std::vector<double> vector_pow(std::vector<double> v, double p) {
    for (double& x : v) x = powp(x, p);
    return v;
}

double inf_norm_rows(const std::vector<double>& A, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += A[i * n + l];
        best = std::max(best, s);
    }
    return best;
}

std::vector<double> matmul(const std::vector<double>& A, const std::vector<double>& B, std::size_t n) {
    std::vector<double> C(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double a = A[i * n + k];
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) C[i * n + j] += a * B[k * n + j];
        }
    return C;
}

// Contraction data for a nonnegative matrix: powers A^1..A^L with ||A^L|| < 1.
struct Contraction {
    std::vector<std::vector<double>> powers;
    double rho = kInf;
};

Contraction contraction(const std::vector<double>& A, std::size_t n, int max_power = 64) {
    Contraction c;
    std::vector<double> P = A;
    for (int L = 1; L <= max_power; ++L) {
        for (double v : P)
            if (!std::isfinite(v)) return c;
        c.powers.push_back(P);
        const double r = inf_norm_rows(P, n);
        if (r < 1.0) {
            c.rho = r;
            return c;
        }
        P = matmul(P, A, n);
    }
    c.powers.clear();
    return c;
}

// Bound of sum_{i > N} max_x (A^i J)(x)^(1/p) given J = J_N.
double contraction_tail(const Contraction& c, const std::vector<double>& J, double p) {
    if (c.powers.empty()) return kInf;
    double acc = 0.0;
    for (const auto& P : c.powers) {
        const std::vector<double> y = matvec(P, J);
        double mx = 0.0;
        for (double v : y) mx = std::max(mx, v);
        acc += rootp(mx, p);
    }
    const double r = rootp(c.rho, p);
    return acc / (1.0 - r);
}

bool is_separable(const Kernel& k) { return k.family() == Kernel::Family::Separable; }

}  // namespace

// ---------------------------------------------------------------- grids

std::vector<std::size_t> QuadratureGrid::unflatten(std::size_t k) const {
    std::vector<std::size_t> idx(axis_nodes.size());
    for (std::size_t a = axis_nodes.size(); a-- > 0;) {
        idx[a] = k % axis_nodes[a].size();
        k /= axis_nodes[a].size();
    }
    return idx;
}

std::size_t QuadratureGrid::flatten(const std::vector<std::size_t>& idx) const {
    std::size_t k = 0;
    for (std::size_t a = 0; a < axis_nodes.size(); ++a) k = k * axis_nodes[a].size() + idx[a];
    return k;
}

bool QuadratureGrid::related(std::size_t i, std::size_t j) const { return domain.leq(nodes[j], nodes[i]); }

std::optional<std::size_t> QuadratureGrid::find(const Point& x) const {
    if (x.size() != axis_nodes.size()) return std::nullopt;
    std::vector<std::size_t> idx(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) {
        const auto& ax = axis_nodes[a];
        bool found = false;
        for (std::size_t l = 0; l < ax.size(); ++l)
            if (same_point(ax[l], x[a])) {
                idx[a] = l;
                found = true;
                break;
            }
        if (!found) return std::nullopt;
    }
    return flatten(idx);
}

QuadratureGrid make_grid(const Domain& domain, const Measure& measure, int level) {
    if (level < 1 || level > 12) throw ConfigError("grid level must lie in [1, 12]");
    measure.validate(domain);
    QuadratureGrid g;
    g.domain = domain;
    g.measure = measure;
    g.level = level;
    std::string scheme;
    for (const auto& am : split_axes(domain, measure)) {
        std::vector<double> x;
        std::string part;
        if (am.domain.kind() == Domain::Kind::Interval) {
            const Interval iv = am.domain.axes()[0];
            if (am.measure.atomless()) {
                x = uniform_nodes(iv.lo, iv.hi, 1 << level);
                part = "uniform-gl6";
            } else {
                x = atoms_in(am.measure, iv.lo, iv.hi);
                part = "atoms";
            }
        } else {
            std::vector<double> w;
            unordered_axis(am.domain, am.measure, x, w);
            part = am.measure.atomless() ? "gauss-legendre" : "atoms";
        }
        if (x.empty()) throw ConfigError("grid: an axis has no nodes");
        if (!scheme.empty()) scheme += "x";
        scheme += part;
        g.axis_nodes.push_back(std::move(x));
    }
    g.scheme = scheme;
    std::size_t total = 1;
    for (const auto& ax : g.axis_nodes) total *= ax.size();
    if (total > 200000) throw ConfigError("grid: too many nodes");
    g.nodes.resize(total);
    for (std::size_t k = 0; k < total; ++k) {
        const auto idx = g.unflatten(k);
        Point p(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a) p[a] = g.axis_nodes[a][idx[a]];
        g.nodes[k] = std::move(p);
    }
    return g;
}

// ---------------------------------------------------------- axis operator

AxisOperator AxisOperator::ordered(KernelPow kp, const Measure& measure, std::vector<double> nodes, bool grade_lo) {
    AxisOperator op;
    op.kp_ = std::move(kp);
    op.nodes_ = std::move(nodes);
    op.ordered_ = true;
    const std::size_t M = op.nodes_.size();
    if (!measure.atomless()) {
        op.discrete_ = true;
        op.mass_.assign(M, 0.0);
        for (std::size_t l = 0; l < M; ++l)
            for (const auto& a : measure.atoms())
                if (same_point(a.point, op.nodes_[l])) op.mass_[l] += a.mass;
        return op;
    }
    if (M < 2) return op;
    const double lo = op.nodes_.front(), hi = op.nodes_.back();
    const bool sing_lo = grade_lo || !std::isfinite(measure.density(lo)) || !std::isfinite(op.kp_(hi, lo)) ||
                         !std::isfinite(op.kp_(op.nodes_[1], lo));
    const bool sing_hi = !std::isfinite(measure.density(hi));
    const Rule& g6 = gauss_legendre(6);
    op.cell_x_.resize(M - 1);
    op.cell_w_.resize(M - 1);
    for (std::size_t m = 0; m + 1 < M; ++m) {
        const double a = op.nodes_[m], b = op.nodes_[m + 1];
        const bool gl = m == 0 && sing_lo, gr = m + 2 == M && sing_hi;
        Rule r;
        if (gl || gr) {
            r = graded_rule(a, b, 12, gl, gr, 6);
        } else {
            const double h = 0.5 * (b - a), c = 0.5 * (a + b);
            for (std::size_t k = 0; k < g6.size(); ++k) {
                r.x.push_back(c + h * g6.x[k]);
                r.w.push_back(h * g6.w[k]);
            }
        }
        for (std::size_t k = 0; k < r.size(); ++k) r.w[k] = xmul(r.w[k], measure.density(r.x[k]));
        op.cell_x_[m] = std::move(r.x);
        op.cell_w_[m] = std::move(r.w);
    }
    op.kw_.resize(M);
    for (std::size_t i = 1; i < M; ++i) {
        op.kw_[i].resize(i);
        for (std::size_t m = 0; m < i; ++m) {
            auto& row = op.kw_[i][m];
            row.resize(op.cell_x_[m].size());
            for (std::size_t k = 0; k < row.size(); ++k)
                row[k] = xmul(op.cell_w_[m][k], op.kp_(op.nodes_[i], op.cell_x_[m][k]));
        }
    }
    return op;
}

AxisOperator AxisOperator::unordered(KernelPow kp, const Measure&, std::vector<double> nodes,
                                     std::vector<double> weights) {
    if (nodes.size() != weights.size()) throw ConfigError("unordered operator: node/weight size mismatch");
    AxisOperator op;
    op.kp_ = std::move(kp);
    op.nodes_ = std::move(nodes);
    op.mass_ = std::move(weights);
    op.ordered_ = false;
    op.discrete_ = true;
    return op;
}

AxisOperator AxisOperator::for_kernel(const Kernel& kernel, double p, const Measure& measure,
                                      std::vector<double> nodes, bool grade_lo) {
    if (kernel.diagonal_singular(p))
        throw ConfigError("kernel is singular on the diagonal; only fractional families support this");
    Kernel k = kernel;
    return ordered([k, p](double t, double r) { return powp(k.eval1(t, r), p); }, measure, std::move(nodes),
                   grade_lo);
}

std::vector<double> AxisOperator::column_matrix(std::size_t j) const {
    const std::size_t n = nodes_.size();
    std::vector<double> A(n * n, 0.0);
    if (!ordered_) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) A[i * n + l] = xmul(kp_(nodes_[i], nodes_[l]), mass_[l]);
        return A;
    }
    if (discrete_) {
        for (std::size_t i = j; i < n; ++i)
            for (std::size_t l = j; l <= i; ++l) A[i * n + l] = xmul(kp_(nodes_[i], nodes_[l]), mass_[l]);
        return A;
    }
    if (j + 1 >= n) return A;
    const std::size_t d = std::min<std::size_t>(5, n - 1 - j);
    std::vector<double> basis(d + 1);
    for (std::size_t m = j; m + 1 < n; ++m) {
        const std::size_t start =
            std::min(std::max(m >= 2 ? m - 2 : std::size_t{0}, j), n - 1 - d);
        const auto& xs = cell_x_[m];
        for (std::size_t g = 0; g < xs.size(); ++g) {
            for (std::size_t q = 0; q <= d; ++q) {
                double b = 1.0;
                for (std::size_t r = 0; r <= d; ++r)
                    if (r != q) b *= (xs[g] - nodes_[start + r]) / (nodes_[start + q] - nodes_[start + r]);
                basis[q] = b;
            }
            for (std::size_t i = m + 1; i < n; ++i) {
                const double c = kw_[i][m][g];
                if (c == 0.0) continue;
                double* row = &A[i * n + start];
                for (std::size_t q = 0; q <= d; ++q) row[q] += c * basis[q];
            }
        }
    }
    return A;
}

double AxisOperator::step_integral(std::size_t i, const std::vector<double>& step) const {
    const std::size_t n = nodes_.size();
    double acc = 0.0;
    if (discrete_) {
        const std::size_t end = ordered_ ? i + 1 : n;
        for (std::size_t l = 0; l < end; ++l) acc += xmul(xmul(kp_(nodes_[i], nodes_[l]), mass_[l]), step[l]);
        return acc;
    }
    for (std::size_t m = 0; m < i; ++m) {
        double c = 0.0;
        for (double v : kw_[i][m]) c += v;
        acc += xmul(c, step[m + 1]);
    }
    return acc;
}

double AxisOperator::fn_integral(std::size_t i, const std::function<double(double)>& f) const {
    const std::size_t n = nodes_.size();
    double acc = 0.0;
    if (discrete_) {
        const std::size_t end = ordered_ ? i + 1 : n;
        for (std::size_t l = 0; l < end; ++l) acc += xmul(xmul(kp_(nodes_[i], nodes_[l]), mass_[l]), f(nodes_[l]));
        return acc;
    }
    for (std::size_t m = 0; m < i; ++m)
        for (std::size_t g = 0; g < kw_[i][m].size(); ++g) acc += xmul(kw_[i][m][g], f(cell_x_[m][g]));
    return acc;
}

std::vector<double> apply_along_axis(const std::vector<double>& A, const std::vector<std::size_t>& dims,
                                     std::size_t axis, const std::vector<double>& in) {
    const std::size_t n = dims[axis];
    std::size_t inner = 1, outer = 1;
    for (std::size_t a = axis + 1; a < dims.size(); ++a) inner *= dims[a];
    for (std::size_t a = 0; a < axis; ++a) outer *= dims[a];
    std::vector<double> out(in.size(), 0.0);
    std::vector<double> slice(n);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t q = 0; q < inner; ++q) {
            const std::size_t base = o * n * inner + q;
            for (std::size_t l = 0; l < n; ++l) slice[l] = in[base + l * inner];
            for (std::size_t i = 0; i < n; ++i) out[base + i * inner] = row_dot(&A[i * n], slice);
        }
    return out;
}

// ---------------------------------------------------------------- regimes

namespace {

bool fractional_sum(const Kernel& k, double p) {
    if (k.family() != Kernel::Family::Sum || p != 1.0 || k.parts().empty()) return false;
    for (const auto& part : k.parts())
        if (part.family() != Kernel::Family::Fractional || part.t0() != k.parts()[0].t0()) return false;
    return true;
}

}  // namespace

Regime classify(const Kernel& kernel, const Domain& domain, const Measure& measure, double p) {
    if (!(p >= 1.0)) throw ConfigError("p must be >= 1");
    kernel.validate(p);
    kernel.validate_domain(domain);
    measure.validate(domain);
    const auto fam = kernel.family();
    switch (domain.kind()) {
        case Domain::Kind::Void:
            if (fam == Kernel::Family::Void || fam == Kernel::Family::Separable) return Regime::VoidClosed;
            return Regime::Tensor;
        case Domain::Kind::Box:
            if (fam != Kernel::Family::Product) throw ConfigError("box domains need a product kernel");
            for (const auto& f : kernel.parts())
                if (f.diagonal_singular(p) || f.family() == Kernel::Family::Fractional ||
                    f.family() == Kernel::Family::TransformedFractional)
                    throw ConfigError("box iterates support regular product factors only");
            return Regime::Tensor;
        case Domain::Kind::Interval:
            break;
    }
    if (fam == Kernel::Family::Fractional || fam == Kernel::Family::TransformedFractional || fractional_sum(kernel, p)) {
        if (measure.kind() != Measure::Kind::Lebesgue)
            throw ConfigError("fractional kernels are supported with Lebesgue measure only");
        if (fam == Kernel::Family::TransformedFractional && p != 1.0)
            throw ConfigError("transformed fractional kernels are supported for p = 1 only");
        return Regime::Family;
    }
    if (fam == Kernel::Family::Multiplicative && measure.atomless()) return Regime::Multiplicative;
    if (kernel.diagonal_singular(p))
        throw ConfigError("kernel is singular on the diagonal; only fractional families support this");
    return Regime::Tensor;
}

// ------------------------------------------------------- family iterates

namespace {

FractionalFamily make_family(const Kernel& k, double p, int layers, double& t0, bool& transformed) {
    std::vector<double> a, b, w;
    transformed = false;
    switch (k.family()) {
        case Kernel::Family::Fractional: {
            const FractionalResolventParams fp{k.alpha(), k.beta(), p};
            fp.validate();
            a = {fp.alpha_p()};
            b = {fp.beta_p()};
            w = {k.coef() > 0.0 ? p * std::log(k.coef()) : -kInf};
            t0 = k.t0();
            break;
        }
        case Kernel::Family::TransformedFractional:
            a = k.alphas();
            b = k.betas();
            w.assign(a.size(), 0.0);
            t0 = k.t0();
            transformed = true;
            break;
        case Kernel::Family::Sum:
            for (const auto& part : k.parts()) {
                a.push_back(part.alpha());
                b.push_back(part.beta());
                w.push_back(part.coef() > 0.0 ? std::log(part.coef()) : -kInf);
            }
            t0 = k.parts()[0].t0();
            break;
        default:
            throw ConfigError("kernel is not of fractional type");
    }
    return FractionalFamily(a, b, w, 4096, layers);
}

}  // namespace

FamilyIterates::FamilyIterates(const Kernel& kernel, double p, int rule_layers)
    : kernel_(kernel), fam_(make_family(kernel, p, rule_layers, t0_, transformed_)) {
    std::vector<double> a, b, w;
    if (kernel.family() == Kernel::Family::Fractional) {
        const FractionalResolventParams fp{kernel.alpha(), kernel.beta(), p};
        a = {fp.alpha_p()};
        b = {fp.beta_p()};
        w = {kernel.coef() > 0.0 ? p * std::log(kernel.coef()) : -kInf};
    } else if (kernel.family() == Kernel::Family::TransformedFractional) {
        a = kernel.alphas();
        b = kernel.betas();
        w.assign(a.size(), 0.0);
    } else {
        for (const auto& part : kernel.parts()) {
            a.push_back(part.alpha());
            b.push_back(part.beta());
            w.push_back(part.coef() > 0.0 ? std::log(part.coef()) : -kInf);
        }
    }
    a0_ = *std::min_element(a.begin(), a.end());
    ainf_ = *std::max_element(a.begin(), a.end());
    b0_ = *std::min_element(b.begin(), b.end());
    binf_ = *std::max_element(b.begin(), b.end());
    if (!(binf_ < a0_)) throw ConfigError("fractional family: need max beta < min alpha");
    log_scale_ = std::log(static_cast<double>(a.size())) + ln_gamma(a0_) + *std::max_element(w.begin(), w.end());
}

double FamilyIterates::weight_l(double s) const {
    const double phi0 = transformed_ ? kernel_.phi()(t0_) : t0_;
    const double y = (transformed_ ? kernel_.phi()(s) : s) - phi0;
    const double dot = transformed_ ? kernel_.phi_dot()(s) : 1.0;
    if (y <= 0.0) return binf_ > 0.0 ? kInf : dot;
    return xmul(dot, std::pow(y, y <= 1.0 ? -binf_ : -b0_));
}

double FamilyIterates::value(int n, double t, double s) {
    const double x = transformed_ ? kernel_.phi()(t) - kernel_.phi()(s) : t - s;
    const double y = transformed_ ? kernel_.phi()(s) - kernel_.phi()(t0_) : s - t0_;
    const double dot = transformed_ ? kernel_.phi_dot()(s) : 1.0;
    double yy = y;
    if (y <= 0.0) {
        if (!fam_.all_beta_zero()) return kInf;
        yy = 1.0;
    }
    double v;
    if (x <= 0.0) {
        v = fam_.total(n, 1e-300, yy);
        if (v > 1e300) v = kInf;
        else if (v < 1e-300) v = 0.0;
    } else {
        v = fam_.total(n, x, yy);
    }
    return xmul(dot, v);
}

double FamilyIterates::log_chat(int n) const {
    const double d = a0_ - binf_;
    double acc = 0.0;
    for (int i = 1; i < n; ++i) acc += ln_gamma(d * i) - ln_gamma(d * i + binf_);
    return acc;
}

double FamilyIterates::log_k(int n, double x) const {
    const double d = a0_ - binf_;
    const double e = x <= 1.0 ? binf_ + d * n - 1.0 : b0_ + (ainf_ - b0_) * n - 1.0;
    if (x <= 0.0) return e > 0.0 ? -kInf : (e == 0.0 ? 0.0 : kInf);
    return e * std::log(x);
}

double FamilyIterates::log_bound(int n, double t, double s) const {
    const double x = transformed_ ? kernel_.phi()(t) - kernel_.phi()(s) : t - s;
    const double l = weight_l(s);
    if (l == 0.0) return -kInf;
    const double d = a0_ - binf_;
    return log_chat(n) + n * log_scale_ - ln_gamma(d * n + binf_) + log_k(n, x) + std::log(l);
}

bool FamilyIterates::exponent_ok(int n) const {
    return binf_ + (a0_ - binf_) * n - 1.0 >= 0.0 && b0_ + (ainf_ - b0_) * n - 1.0 >= 0.0;
}

double FamilyIterates::log_integral_bound(int n, double t, double log_u) const {
    const double X = transformed_ ? kernel_.phi()(t) - kernel_.phi()(t0_) : t - t0_;
    const double d = a0_ - binf_;
    return log_chat(n) + n * log_scale_ - ln_gamma(d * n + binf_) + log_k(n, X) + log_u;
}

double FamilyIterates::lower_set_integral(int n, double t) {
    const double X = transformed_ ? kernel_.phi()(t) - kernel_.phi()(t0_) : t - t0_;
    if (X <= 0.0) return 0.0;
    return fam_.lower_set_integral(n, X);
}

// ------------------------------------------------------ pointwise iterates

namespace {

bool stop_now(int n, int n_max, int max_terms, double tail, double sum, double tol) {
    if (n_max > 0) return n >= n_max;
    if (n >= max_terms) return true;
    return tail <= tol * std::max(1.0, sum);
}

double void_q(const Kernel& k, const Domain& d, const Measure& m, double p) {
    const bool sep = is_separable(k);
    return unordered_mass(d, m, [&](double r) {
        const double v = sep ? xmul(k.k0()(r), k.k1()(r)) : k.k1()(r);
        return powp(v, p);
    });
}

double k0_of(const Kernel& k, double t) { return is_separable(k) ? k.k0()(t) : 1.0; }

double measure_mass(const Measure& m, double a, double b) {
    return integral_1d([](double) { return 1.0; }, a, b, m);
}

}  // namespace

std::vector<double> interval_nodes(const Measure& m, double lo, double hi, int level) {
    if (m.atomless()) {
        if (hi <= lo) return {lo};
        return uniform_nodes(lo, hi, 1 << level);
    }
    std::vector<double> x = atoms_in(m, lo, hi);
    if (x.empty() || !same_point(x.front(), lo)) x.insert(x.begin(), lo);
    if (!same_point(x.back(), hi)) x.push_back(hi);
    x.front() = lo;
    x.back() = hi;
    return x;
}

namespace {

// Pointwise terms on an interval via column 0 of the axis operator.
struct Interval1D {
    std::vector<double> terms;
    double tail = kInf;
    bool tail_known = false;
    bool divergent = false;
};

Interval1D interval_pointwise(const Kernel& kernel, const Measure& measure, double p, double t, double s, int n_max,
                              double tol, const EngineOptions& opt, bool need_tail) {
    Interval1D out;
    const std::vector<double> nodes = interval_nodes(measure, s, t, opt.level);
    const AxisOperator op = AxisOperator::for_kernel(kernel, p, measure, nodes);
    const std::size_t M = nodes.size(), last = M - 1;
    const std::vector<double> A = op.column_matrix(0);
    std::vector<double> r(M);
    for (std::size_t i = 0; i < M; ++i) r[i] = powp(kernel.eval1(nodes[i], s), p);

    const Domain dom = Domain::interval(s, t);
    const bool atomless = measure.atomless();
    const bool mono = atomless && kernel.monotone_declared(dom);
    const bool sep = atomless && !mono && is_separable(kernel);
    double K = 0.0, H = 0.0;
    std::vector<double> brow;
    if (mono) K = op.fn_integral(last, [](double) { return 1.0; });
    if (sep) {
        H = integral_1d([&](double x) { return powp(xmul(kernel.k0()(x), kernel.k1()(x)), p); }, s, t, measure);
        const Kernel k = kernel;
        const AxisOperator ob =
            AxisOperator::ordered([k, p](double, double x) { return powp(k.k1()(x), p); }, measure, nodes);
        const std::vector<double> B = ob.column_matrix(0);
        brow.assign(B.begin() + last * M, B.begin() + (last + 1) * M);
    }
    double sum = 0.0;
    for (int n = 1;; ++n) {
        if (n > 1) r = matvec(A, r);
        const double term = r[last];
        out.terms.push_back(term);
        sum += term;
        if (term == kInf) {
            out.divergent = true;
            out.tail = kInf;
            return out;
        }
        double tail = kInf;
        bool known = false;
        if (need_tail || n_max <= 0) {
            if (mono) {
                tail = xmul(term, std::expm1(K));
                known = std::isfinite(K);
            } else if (sep) {
                const double B = row_dot(brow.data(), r);
                tail = xmul(xmul(powp(kernel.k0()(t), p), B), std::exp(H));
                known = std::isfinite(H);
            } else if (!atomless) {
                std::vector<double> y = matvec(A, r);
                bool ok = true;
                for (std::size_t i = 0; i < M && ok; ++i) {
                    const double aii = A[i * M + i];
                    if (aii >= 1.0 && y[i] > 0.0) ok = false;
                    double acc = y[i];
                    for (std::size_t l = 0; l < i; ++l) acc += xmul(A[i * M + l], y[l]);
                    y[i] = acc / (1.0 - std::min(aii, 0.999999999999));
                }
                known = ok;
                tail = ok ? y[last] : kInf;
                if (!ok) out.divergent = true;
            }
        }
        out.tail = tail;
        out.tail_known = known;
        if (n_max > 0 && n >= n_max) return out;
        if (out.divergent && n_max <= 0) return out;
        if (n_max <= 0) {
            if (known && tail <= tol * std::max(1.0, sum)) return out;
            if (!known && n > 2 && term < tol * std::max(1.0, sum) && term < 0.5 * out.terms[n - 2]) return out;
            if (n >= opt.max_terms) return out;
        }
    }
}

}  // namespace

PointwiseIterates pointwise_iterates(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                                     const Point& t, const Point& s, int n_max, double tol,
                                     const EngineOptions& opt) {
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (!domain.contains(t) || !domain.contains(s)) throw ConfigError("point outside the domain");
    if (!domain.leq(s, t)) throw std::domain_error("iterated kernels need s <= t");
    const Regime regime = classify(kernel, domain, measure, p);
    PointwiseIterates out;
    double sum = 0.0;
    switch (regime) {
        case Regime::Family: {
            FamilyIterates F(kernel, p);
            const double tt = t[0], ss = s[0];
            for (int n = 1;; ++n) {
                const double v = F.value(n, tt, ss);
                out.terms.push_back(v);
                sum += v;
                if (v == kInf) {
                    out.tail = kInf;
                    out.tail_known = false;
                    return out;
                }
                const SeriesValue tl = sum_log_concave([&](int m) { return F.log_bound(m, tt, ss); }, n + 1, 1e-3 * tol);
                out.tail = tl.divergent ? kInf : tl.sum.value() + tl.tail_bound.value();
                out.tail_known = tl.converged;
                if (stop_now(n, n_max, opt.max_terms, out.tail, sum, tol)) return out;
            }
        }
        case Regime::VoidClosed: {
            const double Q = void_q(kernel, domain, measure, p);
            const double a = powp(xmul(k0_of(kernel, t[0]), kernel.k1()(s[0])), p);
            for (int n = 1;; ++n) {
                const double v = xmul(a, std::pow(Q, n - 1));
                out.terms.push_back(v);
                sum += v;
                if (a == 0.0 || Q == 0.0) {
                    out.tail = 0.0;
                } else if (Q < 1.0) {
                    out.tail = a * std::pow(Q, n) / (1.0 - Q);
                } else {
                    out.tail = kInf;
                    out.divergent = true;
                }
                out.tail_known = true;
                if (out.divergent || stop_now(n, n_max, opt.max_terms, out.tail, sum, tol)) return out;
            }
        }
        case Regime::Multiplicative: {
            const double tt = t[0], ss = s[0];
            const double e = std::exp(p * kernel.nu_mass(ss, tt));
            const double mu = measure_mass(measure, ss, tt);
            for (int n = 1;; ++n) {
                const double v = n == 1 ? e : xmul(e, std::exp((n - 1) * std::log(mu) - std::lgamma(n)));
                out.terms.push_back(v);
                sum += v;
                const SeriesValue tl = mu > 0.0 ? sum_log_concave(
                                                      [&](int m) { return m * std::log(mu) - std::lgamma(m + 1.0); },
                                                      n, 1e-17)
                                                : SeriesValue{};
                out.tail = mu > 0.0 ? xmul(e, tl.sum.value() + tl.tail_bound.value()) : 0.0;
                out.tail_known = true;
                if (stop_now(n, n_max, opt.max_terms, out.tail, sum, tol)) return out;
            }
        }
        case Regime::Tensor:
            break;
    }
    if (domain.kind() == Domain::Kind::Interval) {
        const Interval1D r = interval_pointwise(kernel, measure, p, t[0], s[0], n_max, tol, opt, true);
        out.terms = r.terms;
        out.tail = r.tail;
        out.tail_known = r.tail_known;
        out.divergent = r.divergent;
        return out;
    }
    if (domain.kind() == Domain::Kind::Box) {
        const auto axes = split_axes(domain, measure);
        const auto& factors = kernel.parts();
        const std::size_t d = domain.ordered_dim();
        EngineOptions ao = opt;
        ao.level = opt.box_level + 2;
        double tau = 1.0, Q = 1.0;
        if (domain.tail()) {
            const ScalarFn tf = kernel.tail_factor() ? *kernel.tail_factor() : ScalarFn::constant(1.0);
            tau = powp(tf(s[d]), p);
            Q = unordered_mass(axes[d].domain, axes[d].measure, [&](double r) { return powp(tf(r), p); });
        }
        int count = n_max > 0 ? n_max : 0;
        std::vector<Interval1D> per_axis;
        bool majorant = true;
        std::vector<double> lk0(d), lK(d);
        for (std::size_t a = 0; a < d; ++a) {
            const Measure& ma = axes[a].measure;
            per_axis.push_back(interval_pointwise(factors[a], ma, p, t[a], s[a], n_max, 1e-3 * tol, ao, false));
            count = std::max<int>(count, static_cast<int>(per_axis.back().terms.size()));
            const Domain da = Domain::interval(s[a], t[a]);
            if (!ma.atomless() || !factors[a].monotone_declared(da)) majorant = false;
            lk0[a] = std::log(powp(factors[a].eval1(t[a], s[a]), p));
            lK[a] = std::log(integral_1d([&](double r) { return powp(factors[a].eval1(t[a], r), p); }, s[a], t[a], ma));
        }
        if (n_max <= 0) {
            for (std::size_t a = 0; a < d; ++a)
                if (static_cast<int>(per_axis[a].terms.size()) < count) {
                    per_axis[a] = interval_pointwise(factors[a], axes[a].measure, p, t[a], s[a], count, tol, ao, false);
                }
        }
        for (int n = 1; n <= count; ++n) {
            double v = tau * std::pow(Q, n - 1);
            for (std::size_t a = 0; a < d; ++a) v = xmul(v, per_axis[a].terms[n - 1]);
            out.terms.push_back(v);
        }
        if (majorant && Q >= 0.0) {
            const double lq = std::log(Q), lt = std::log(tau);
            const SeriesValue tl = sum_log_concave(
                [&](int n) {
                    double acc = lt + (n - 1) * lq;
                    for (std::size_t a = 0; a < d; ++a) acc += lk0[a] + (n - 1) * lK[a] - std::lgamma(n);
                    return acc;
                },
                count + 1, 1e-3 * tol);
            out.tail = tl.divergent ? kInf : tl.sum.value() + tl.tail_bound.value();
            out.tail_known = tl.converged;
        } else {
            out.tail = kInf;
            out.tail_known = false;
        }
        return out;
    }
    // void set, Nystrom
    std::vector<double> x, w;
    unordered_axis(domain, measure, x, w);
    const std::size_t M = x.size();
    const Kernel k = kernel;
    auto kp = [&](double a, double b) { return powp(k.eval1(a, b), p); };
    std::vector<double> A(M * M);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t l = 0; l < M; ++l) A[i * M + l] = xmul(kp(x[i], x[l]), w[l]);
    std::vector<double> trow(M);
    for (std::size_t l = 0; l < M; ++l) trow[l] = xmul(kp(t[0], x[l]), w[l]);
    std::vector<double> r(M);
    for (std::size_t i = 0; i < M; ++i) r[i] = kp(x[i], s[0]);
    const bool mono = kernel.monotone_declared(domain);
    double Q = 0.0;
    if (mono)
        for (std::size_t l = 0; l < M; ++l) Q += trow[l];
    for (int n = 1;; ++n) {
        const double term = n == 1 ? kp(t[0], s[0]) : row_dot(trow.data(), r);
        if (n > 1) r = matvec(A, r);
        out.terms.push_back(term);
        sum += term;
        if (mono) {
            double mx = 0.0;
            for (double v : r) mx = std::max(mx, v);
            out.tail_known = true;
            if (mx == 0.0) out.tail = 0.0;
            else if (Q < 1.0) out.tail = mx * Q / (1.0 - Q);
            else {
                out.tail = kInf;
                out.divergent = true;
                return out;
            }
        } else {
            out.tail = kInf;
            out.tail_known = false;
        }
        if (n_max > 0 && n >= n_max) return out;
        if (n_max <= 0) {
            if (out.tail_known && out.tail <= tol * std::max(1.0, sum)) return out;
            if (!out.tail_known && n > 2 && term < tol * std::max(1.0, sum)) return out;
            if (n >= opt.max_terms) return out;
        }
    }
}

// ------------------------------------------------------ lower-set series

namespace {

struct SeriesBuilder {
    LowerSetSeries out;
    double sum = 0.0;
    double p = 1.0;

    void push(double J) {
        out.J.push_back(J);
        sum += rootp(J, p);
    }
    // returns true when done
    bool finish(double tail, bool known, int n, int n_max, int max_terms, double tol) {
        if (!std::isfinite(sum)) {
            out.series.sum = ExtReal::infinity();
            out.series.tail_bound = ExtReal::infinity();
            out.series.divergent = true;
            out.series.converged = false;
            out.series.terms_used = n;
            return true;
        }
        bool done = false;
        if (n_max > 0) done = n >= n_max;
        else if (known && tail <= tol * std::max(1.0, sum)) done = true;
        else if (!known && n > 2 && rootp(out.J.back(), p) < tol * std::max(1.0, sum) &&
                 out.J.back() < 0.5 * out.J[n - 2])
            done = true;
        else if (n >= max_terms) done = true;
        if (!done) return false;
        out.series.sum = ExtReal(sum);
        out.series.tail_bound = known ? ExtReal(tail) : ExtReal::infinity();
        out.series.converged = known && std::isfinite(tail) && (n_max > 0 || tail <= tol * std::max(1.0, sum));
        out.series.divergent = known && !std::isfinite(tail);
        out.series.terms_used = n;
        return true;
    }
};

double weight_pow(const Weight& w, double p, const Point& x) { return w.unit() ? 1.0 : powp(w.fn(x), p); }

}  // namespace

LowerSetSeries lower_set_series(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                                const Point& t, const Weight& weight, double tol, int n_max,
                                const EngineOptions& opt) {
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (!domain.contains(t)) throw ConfigError("point outside the domain");
    const Regime regime = classify(kernel, domain, measure, p);
    SeriesBuilder sb;
    sb.p = p;
    const int max_terms = opt.max_terms;

    if (regime == Regime::VoidClosed) {
        const double Q = void_q(kernel, domain, measure, p);
        const double V = unordered_mass(domain, measure, [&](double r) {
            return xmul(powp(kernel.k1()(r), p), weight_pow(weight, p, {r}));
        });
        const double a = xmul(powp(k0_of(kernel, t[0]), p), V);
        const double rq = rootp(Q, p);
        for (int n = 1;; ++n) {
            sb.push(xmul(a, std::pow(Q, n - 1)));
            double tail;
            if (a == 0.0 || Q == 0.0) tail = 0.0;
            else if (rq < 1.0) tail = rootp(a, p) * std::pow(rq, n) / (1.0 - rq);
            else tail = kInf;
            if (n_max <= 0 && tail == kInf) {
                sb.out.series.sum = ExtReal::infinity();
                sb.out.series.tail_bound = ExtReal::infinity();
                sb.out.series.divergent = true;
                sb.out.series.terms_used = n;
                return sb.out;
            }
            if (sb.finish(tail, true, n, n_max, max_terms, tol)) {
                // geometric series: report the closed form
                if (n_max <= 0 && std::isfinite(tail)) {
                    sb.out.series.sum = ExtReal(a == 0.0 ? 0.0 : rootp(a, p) / (1.0 - rq));
                    sb.out.series.tail_bound = ExtReal();
                }
                return sb.out;
            }
        }
    }

    if (regime == Regime::Family) {
        FamilyIterates F(kernel, p);
        const double lo = domain.axes()[0].lo, tt = t[0];
        const bool closed = weight.unit() && lo == F.t0();
        auto vp = [&](double s) { return weight_pow(weight, p, {s}); };
        const double U = tt > lo ? integral_1d([&](double s) { return xmul(F.weight_l(s), vp(s)); }, lo, tt,
                                               Measure::lebesgue())
                                 : 0.0;
        for (int n = 1;; ++n) {
            double J;
            if (tt <= lo) J = 0.0;
            else if (closed) J = F.lower_set_integral(n, tt);
            else J = integral_1d([&](double s) { return xmul(F.value(n, tt, s), vp(s)); }, lo, tt, Measure::lebesgue());
            sb.push(J);
            double tail = kInf;
            bool known = false;
            if (U == 0.0) {
                tail = 0.0;
                known = true;
            } else if (std::isfinite(U) && F.exponent_ok(n + 1)) {
                const double lu = std::log(U);
                const SeriesValue tl =
                    sum_log_concave([&](int m) { return F.log_integral_bound(m, tt, lu) / p; }, n + 1, 1e-3 * tol);
                known = tl.converged;
                tail = tl.divergent ? kInf : tl.sum.value() + tl.tail_bound.value();
            }
            if (n_max <= 0 && !known && n < max_terms) continue;
            if (sb.finish(tail, known, n, n_max, max_terms, tol)) return sb.out;
        }
    }

    if (regime == Regime::Multiplicative) {
        const double lo = domain.axes()[0].lo, tt = t[0];
        auto vp = [&](double s) { return weight_pow(weight, p, {s}); };
        const double M = measure_mass(measure, lo, tt);
        const double nu_pos = integral_1d([&](double r) { return std::max(0.0, kernel.nu_density()(r)); }, lo, tt,
                                          Measure::lebesgue());
        const double V = integral_1d(vp, lo, tt, measure);
        const double khat = std::exp(p * nu_pos);
        for (int n = 1;; ++n) {
            const double J = integral_1d(
                [&](double s) {
                    const double mu = measure_mass(measure, s, tt);
                    const double r = n == 1 ? 1.0 : std::exp((n - 1) * std::log(mu) - std::lgamma(n));
                    return xmul(xmul(std::exp(p * kernel.nu_mass(s, tt)), r), vp(s));
                },
                lo, tt, measure);
            sb.push(J);
            double tail = 0.0;
            if (M > 0.0 && V > 0.0) {
                const double lm = std::log(M), lc = std::log(khat * V);
                const SeriesValue tl = sum_log_concave(
                    [&](int m) { return (lc + (m - 1) * lm - std::lgamma(m)) / p; }, n + 1, 1e-3 * tol);
                tail = tl.divergent ? kInf : tl.sum.value() + tl.tail_bound.value();
            }
            if (sb.finish(tail, true, n, n_max, max_terms, tol)) return sb.out;
        }
    }

    if (domain.kind() == Domain::Kind::Interval) {
        const double lo = domain.axes()[0].lo, tt = t[0];
        std::vector<double> nodes = interval_nodes(measure, lo, tt, opt.level);
        const std::size_t M = nodes.size(), last = M - 1;
        if (measure.atomless() && tt <= lo) {
            for (int n = 1;; ++n) {
                sb.push(0.0);
                if (sb.finish(0.0, true, n, n_max, max_terms, tol)) return sb.out;
            }
        }
        const bool grade = !weight.unit() && !std::isfinite(weight_pow(weight, p, {lo}));
        const AxisOperator op = AxisOperator::for_kernel(kernel, p, measure, nodes, grade);
        const std::vector<double> A = op.column_matrix(0);
        auto vp = [&](double s) { return weight_pow(weight, p, {s}); };
        std::vector<double> J(M);
        for (std::size_t i = 0; i < M; ++i) J[i] = op.fn_integral(i, vp);

        const Domain dom = Domain::interval(lo, tt);
        const bool atomless = measure.atomless();
        const bool mono = atomless && kernel.monotone_declared(dom);
        const bool sep = atomless && !mono && is_separable(kernel);
        double G = 0.0, EH = 0.0;
        std::vector<double> brow;
        Contraction con;
        if (mono) G = factorial_series(op.fn_integral(last, [](double) { return 1.0; }), 1, p);
        if (sep) {
            const double H =
                integral_1d([&](double x) { return powp(xmul(kernel.k0()(x), kernel.k1()(x)), p); }, lo, tt, measure);
            EH = exp_series(H, p);
            const Kernel k = kernel;
            const AxisOperator ob =
                AxisOperator::ordered([k, p](double, double x) { return powp(k.k1()(x), p); }, measure, nodes, grade);
            const std::vector<double> B = ob.column_matrix(0);
            brow.assign(B.begin() + last * M, B.begin() + (last + 1) * M);
        }
        if (!atomless) con = contraction(A, M);
        for (int n = 1;; ++n) {
            if (n > 1) J = matvec(A, J);
            sb.push(J[last]);
            double tail = kInf;
            bool known = false;
            if (mono) {
                tail = xmul(rootp(J[last], p), G);
                known = std::isfinite(G);
            } else if (sep) {
                tail = xmul(rootp(xmul(powp(kernel.k0()(tt), p), row_dot(brow.data(), J)), p), EH);
                known = std::isfinite(EH);
            } else if (!atomless) {
                tail = contraction_tail(con, J, p);
                known = std::isfinite(tail);
            }
            if (sb.finish(tail, known, n, n_max, max_terms, tol)) return sb.out;
        }
    }

    if (domain.kind() == Domain::Kind::Box) {
        const auto axes = split_axes(domain, measure);
        const auto& factors = kernel.parts();
        const std::size_t d = domain.ordered_dim();
        std::vector<std::size_t> dims;
        std::vector<std::vector<double>> mats, nodes;
        bool mono = true;
        double Kb = 1.0;
        for (std::size_t a = 0; a < d; ++a) {
            const Interval iv = domain.axes()[a];
            const Measure& ma = axes[a].measure;
            nodes.push_back(interval_nodes(ma, iv.lo, t[a], opt.box_level));
            if (ma.atomless() && t[a] <= iv.lo) {
                for (int n = 1;; ++n) {
                    sb.push(0.0);
                    if (sb.finish(0.0, true, n, n_max, max_terms, tol)) return sb.out;
                }
            }
            const AxisOperator op = AxisOperator::for_kernel(factors[a], p, ma, nodes.back());
            mats.push_back(op.column_matrix(0));
            dims.push_back(nodes.back().size());
            if (!ma.atomless() || !factors[a].monotone_declared(Domain::interval(iv.lo, t[a]))) mono = false;
            Kb *= op.fn_integral(nodes.back().size() - 1, [](double) { return 1.0; });
        }
        if (domain.tail()) {
            std::vector<double> x, w;
            unordered_axis(axes[d].domain, axes[d].measure, x, w);
            const ScalarFn tf = kernel.tail_factor() ? *kernel.tail_factor() : ScalarFn::constant(1.0);
            std::vector<double> T(x.size() * x.size());
            double Q = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                for (std::size_t l = 0; l < x.size(); ++l) T[i * x.size() + l] = xmul(powp(tf(x[l]), p), w[l]);
            for (std::size_t l = 0; l < x.size(); ++l) Q += T[l];
            Kb *= Q;
            nodes.push_back(x);
            mats.push_back(T);
            dims.push_back(x.size());
        }
        std::size_t total = 1;
        for (auto v : dims) total *= v;
        std::vector<double> J(total);
        for (std::size_t k = 0; k < total; ++k) {
            std::size_t rem = k;
            Point x(dims.size());
            for (std::size_t a = dims.size(); a-- > 0;) {
                x[a] = nodes[a][rem % dims[a]];
                rem /= dims[a];
            }
            J[k] = weight_pow(weight, p, x);
        }
        auto apply_all = [&](std::vector<double> v) {
            for (std::size_t a = 0; a < dims.size(); ++a) v = apply_along_axis(mats[a], dims, a, v);
            return v;
        };
        std::size_t at = 0;
        for (std::size_t a = 0; a < d; ++a) at = at * dims[a] + (dims[a] - 1);
        if (domain.tail()) at = at * dims[d];
        const double G = mono ? factorial_series(Kb, static_cast<int>(d), p) : kInf;
        for (int n = 1;; ++n) {
            J = apply_all(J);
            sb.push(J[at]);
            const double tail = mono ? xmul(rootp(J[at], p), G) : kInf;
            if (sb.finish(tail, mono && std::isfinite(G), n, n_max, max_terms, tol)) return sb.out;
        }
    }

    // void set, Nystrom
    std::vector<double> x, w;
    unordered_axis(domain, measure, x, w);
    const std::size_t M = x.size();
    auto kp = [&](double a, double b) { return powp(kernel.eval1(a, b), p); };
    std::vector<double> A(M * M), trow(M);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t l = 0; l < M; ++l) A[i * M + l] = xmul(kp(x[i], x[l]), w[l]);
    for (std::size_t l = 0; l < M; ++l) trow[l] = xmul(kp(t[0], x[l]), w[l]);
    std::vector<double> J(M);
    for (std::size_t l = 0; l < M; ++l) J[l] = weight_pow(weight, p, {x[l]});
    const bool mono = kernel.monotone_declared(domain);
    double Q = 0.0;
    for (double v : trow) Q += v;
    const double G = mono ? factorial_series(Q, 0, p) : kInf;
    for (int n = 1;; ++n) {
        const double Jt = row_dot(trow.data(), J);
        J = matvec(A, J);
        sb.push(Jt);
        double mx = 0.0;
        for (double v : J) mx = std::max(mx, v);
        const double tail = mono ? xmul(rootp(mx, p), G) : kInf;
        if (sb.finish(tail, mono && std::isfinite(G), n, n_max, max_terms, tol)) return sb.out;
    }
}

// --------------------------------------------------------- grid series

GridSeries grid_step_series(const Kernel& kernel, const QuadratureGrid& grid, double p, const std::vector<double>& step,
                            int n_max) {
    if (n_max < 1) throw ConfigError("grid series: n_max must be >= 1");
    const Regime regime = classify(kernel, grid.domain, grid.measure, p);
    const std::size_t M = grid.size();
    if (step.size() != M) throw ConfigError("grid series: step size mismatch");
    GridSeries out;
    out.tail.assign(M, kInf);
    const std::vector<double> sp = vector_pow(step, p);

    if (regime == Regime::VoidClosed) {
        std::vector<double> x, w;
        unordered_axis(grid.domain, grid.measure, x, w);
        const double Q = void_q(kernel, grid.domain, grid.measure, p);
        double V = 0.0;
        for (std::size_t l = 0; l < M; ++l) V += xmul(xmul(powp(kernel.k1()(x[l]), p), w[l]), sp[l]);
        const double rq = rootp(Q, p);
        for (int n = 1; n <= n_max; ++n) {
            std::vector<double> J(M);
            for (std::size_t i = 0; i < M; ++i) J[i] = xmul(xmul(powp(k0_of(kernel, x[i]), p), V), std::pow(Q, n - 1));
            out.J.push_back(J);
        }
        for (std::size_t i = 0; i < M; ++i) {
            const double a = xmul(powp(k0_of(kernel, x[i]), p), V);
            if (a == 0.0 || Q == 0.0) out.tail[i] = 0.0;
            else if (rq < 1.0) out.tail[i] = rootp(a, p) * std::pow(rq, n_max) / (1.0 - rq);
        }
        return out;
    }
    if (grid.domain.kind() != Domain::Kind::Interval)
        throw ConfigError("grid series: interval or void grids with separable kernels only");
    const std::vector<double>& x = grid.axis_nodes[0];
    const double lo = x.front();

    if (regime == Regime::Family) {
        FamilyIterates F(kernel, p);
        const Rule& g8 = gauss_legendre(8);
        auto cell_rule = [&](double a, double b, bool gl, bool gr) {
            if (gl || gr) return graded_rule(a, b, 10, gl, gr, 8);
            Rule r;
            const double h = 0.5 * (b - a), c = 0.5 * (a + b);
            for (std::size_t k = 0; k < g8.size(); ++k) {
                r.x.push_back(c + h * g8.x[k]);
                r.w.push_back(h * g8.w[k]);
            }
            return r;
        };
        std::vector<std::vector<Rule>> rules(M);
        std::vector<double> U(M, 0.0);
        for (std::size_t i = 1; i < M; ++i)
            for (std::size_t m = 0; m < i; ++m) {
                rules[i].push_back(cell_rule(x[m], x[m + 1], m == 0, m + 1 == i));
                const Rule& r = rules[i].back();
                double acc = 0.0;
                for (std::size_t g = 0; g < r.size(); ++g) acc += xmul(r.w[g], F.weight_l(r.x[g]));
                U[i] += xmul(acc, sp[m + 1]);
            }
        for (int n = 1; n <= n_max; ++n) {
            std::vector<double> J(M, 0.0);
            for (std::size_t i = 1; i < M; ++i)
                for (std::size_t m = 0; m < i; ++m) {
                    if (sp[m + 1] == 0.0) continue;
                    const Rule& r = rules[i][m];
                    double acc = 0.0;
                    for (std::size_t g = 0; g < r.size(); ++g) acc += xmul(r.w[g], F.value(n, x[i], r.x[g]));
                    J[i] += xmul(acc, sp[m + 1]);
                }
            out.J.push_back(J);
        }
        int first = n_max + 1;
        while (!F.exponent_ok(first)) ++first;
        for (std::size_t i = 0; i < M; ++i) {
            if (U[i] == 0.0) {
                out.tail[i] = 0.0;
                continue;
            }
            if (!std::isfinite(U[i])) continue;
            const double lu = std::log(U[i]);
            const SeriesValue tl =
                sum_log_concave([&](int m) { return F.log_integral_bound(m, x[i], lu) / p; }, first, 1e-14);
            double extra = 0.0;
            for (int m = n_max + 1; m < first; ++m) {
                const double J = integral_1d(
                    [&](double s) {
                        const auto c = static_cast<std::size_t>(
                            std::upper_bound(x.begin(), x.end(), s) - x.begin());
                        return xmul(F.value(m, x[i], s), sp[std::min(c, M - 1)]);
                    },
                    lo, x[i], Measure::lebesgue());
                extra += rootp(J, p);
            }
            if (!tl.divergent) out.tail[i] = extra + tl.sum.value() + tl.tail_bound.value();
        }
        return out;
    }

    // tensor or multiplicative regime on the grid nodes
    if (kernel.diagonal_singular(p))
        throw ConfigError("kernel is singular on the diagonal; only fractional families support this");
    const Measure& mu = grid.measure;
    const AxisOperator op = AxisOperator::for_kernel(kernel, p, mu, x);
    const std::vector<double> A = op.column_matrix(0);
    std::vector<double> J(M);
    for (std::size_t i = 0; i < M; ++i) J[i] = op.step_integral(i, sp);
    for (int n = 1; n <= n_max; ++n) {
        if (n > 1) J = matvec(A, J);
        out.J.push_back(J);
    }
    const bool atomless = mu.atomless();
    const bool mono = atomless && kernel.monotone_declared(grid.domain);
    const Kernel k = kernel;
    if (mono) {
        for (std::size_t i = 0; i < M; ++i) {
            const double G = factorial_series(op.fn_integral(i, [](double) { return 1.0; }), 1, p);
            out.tail[i] = xmul(rootp(J[i], p), G);
        }
    } else if (atomless && is_separable(kernel)) {
        const AxisOperator ob = AxisOperator::ordered([k, p](double, double r) { return powp(k.k1()(r), p); }, mu, x);
        const AxisOperator oh =
            AxisOperator::ordered([k, p](double, double r) { return powp(xmul(k.k0()(r), k.k1()(r)), p); }, mu, x);
        const std::vector<double> B = matvec(ob.column_matrix(0), J);
        for (std::size_t i = 0; i < M; ++i) {
            const double H = oh.fn_integral(i, [](double) { return 1.0; });
            out.tail[i] = xmul(rootp(xmul(powp(kernel.k0()(x[i]), p), B[i]), p), exp_series(H, p));
        }
    } else if (regime == Regime::Multiplicative) {
        const AxisOperator o1 = AxisOperator::ordered([](double, double) { return 1.0; }, mu, x);
        const std::vector<double> IJ = matvec(o1.column_matrix(0), J);
        for (std::size_t i = 0; i < M; ++i) {
            const double Mi = o1.fn_integral(i, [](double) { return 1.0; });
            const double nu_pos = integral_1d([&](double r) { return std::max(0.0, k.nu_density()(r)); }, lo, x[i],
                                              Measure::lebesgue());
            out.tail[i] = xmul(rootp(xmul(std::exp(p * nu_pos), IJ[i]), p), exp_series(Mi, p));
        }
    } else if (!atomless) {
        const Contraction con = contraction(A, M);
        const double T = contraction_tail(con, J, p);
        out.tail.assign(M, T);
    }
    return out;
}

std::vector<double> cumulative_integral(const QuadratureGrid& grid, const std::vector<double>& f) {
    if (grid.domain.kind() != Domain::Kind::Interval) throw ConfigError("cumulative integral: interval grids only");
    if (f.size() != grid.size()) throw ConfigError("cumulative integral: size mismatch");
    const AxisOperator op = AxisOperator::ordered([](double, double) { return 1.0; }, grid.measure, grid.axis_nodes[0]);
    return matvec(op.column_matrix(0), f);
}

}  // namespace volres
