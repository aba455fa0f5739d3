#include "volres/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "volres/errors.hpp"
#include "volres/quadrature.hpp"

namespace volres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x^e for x >= 0 with 0^e = inf for e < 0 and 0^0 = 1.
double pow0(double x, double e) {
    if (e == 0.0) return 1.0;
    if (x <= 0.0) return e > 0.0 ? 0.0 : kInf;
    return std::pow(x, e);
}

}  // namespace

Kernel Kernel::separable(ScalarFn k0, ScalarFn k1, Monotone k0_monotone) {
    Kernel k;
    k.family_ = Family::Separable;
    k.f0_ = std::move(k0);
    k.f1_ = std::move(k1);
    k.mono_ = k0_monotone;
    return k;
}

Kernel Kernel::constant(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("constant kernel: c must be finite and >= 0");
    return separable(ScalarFn::constant(c), ScalarFn::constant(1.0), Monotone::Constant);
}

Kernel Kernel::fractional(double alpha, double beta, double t0, double coef) {
    if (!(alpha > 0.0)) throw ConfigError("fractional kernel: alpha must be > 0");
    if (!(beta >= 0.0)) throw ConfigError("fractional kernel: beta must be >= 0");
    if (!(coef >= 0.0) || !std::isfinite(coef)) throw ConfigError("fractional kernel: coef must be finite and >= 0");
    if (!std::isfinite(t0)) throw ConfigError("fractional kernel: t0 must be finite");
    Kernel k;
    k.family_ = Family::Fractional;
    k.alpha_ = {alpha};
    k.beta_ = {beta};
    k.t0_ = t0;
    k.coef_ = coef;
    return k;
}

Kernel Kernel::transformed_fractional(ScalarFn phi, ScalarFn phi_dot, std::vector<double> alpha,
                                      std::vector<double> beta, double t0) {
    if (alpha.empty() || alpha.size() != beta.size())
        throw ConfigError("transformed fractional kernel: alpha and beta must be nonempty and of equal length");
    Kernel k;
    k.family_ = Family::TransformedFractional;
    k.f0_ = std::move(phi);
    k.f1_ = std::move(phi_dot);
    k.alpha_ = std::move(alpha);
    k.beta_ = std::move(beta);
    k.t0_ = t0;
    const auto b = k.alpha_beta_bounds();
    for (double a : k.alpha_)
        if (!(a > 0.0)) throw ConfigError("transformed fractional kernel: alpha entries must be > 0");
    if (!(b.beta0 >= 0.0)) throw ConfigError("transformed fractional kernel: beta entries must be >= 0");
    if (!(b.beta_inf < b.alpha0)) throw ConfigError("transformed fractional kernel: need max beta < min alpha");
    if (!std::isfinite(k.f0_(t0))) throw ConfigError("transformed fractional kernel: phi(t0) must be finite");
    return k;
}

Kernel Kernel::sum(std::vector<Kernel> parts) {
    if (parts.empty()) throw ConfigError("sum kernel needs at least one part");
    Kernel k;
    k.family_ = Family::Sum;
    k.children_ = std::make_shared<const std::vector<Kernel>>(std::move(parts));
    return k;
}

Kernel Kernel::product(std::vector<Kernel> factors, std::optional<ScalarFn> tail_factor) {
    if (factors.empty()) throw ConfigError("product kernel needs at least one factor");
    for (const auto& f : factors)
        if (f.family() == Family::Product) throw ConfigError("product kernel factors must be one-dimensional");
    Kernel k;
    k.family_ = Family::Product;
    k.children_ = std::make_shared<const std::vector<Kernel>>(std::move(factors));
    k.tail_ = std::move(tail_factor);
    return k;
}

Kernel Kernel::void_kernel(ScalarFn k1) {
    Kernel k;
    k.family_ = Family::Void;
    k.f1_ = std::move(k1);
    return k;
}

Kernel Kernel::multiplicative(ScalarFn nu_density) {
    Kernel k;
    k.family_ = Family::Multiplicative;
    k.f0_ = std::move(nu_density);
    return k;
}

double Kernel::nu_mass(double s, double t) const {
    const ScalarFn& d = f0_;
    switch (d.kind()) {
        case ScalarFn::Kind::Const:
            return d.param(0) * (t - s);
        case ScalarFn::Kind::Linear:
            return d.param(0) * (t - s) + 0.5 * d.param(1) * (t * t - s * s);
        case ScalarFn::Kind::Exp:
            if (d.param(1) == 0.0) return d.param(0) * (t - s);
            return d.param(0) * (std::exp(d.param(1) * t) - std::exp(d.param(1) * s)) / d.param(1);
        case ScalarFn::Kind::Power: {
            const double e = d.param(1) + 1.0, sh = d.param(2);
            if (e > 0.0 && s >= sh) return d.param(0) * (std::pow(t - sh, e) - std::pow(s - sh, e)) / e;
            break;
        }
        case ScalarFn::Kind::Custom:
            break;
    }
    if (t == s) return 0.0;
    const Rule& g = gauss_legendre(32);
    const double h = 0.5 * (t - s), m = 0.5 * (t + s);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g.w[i] * d(m + h * g.x[i]);
    return acc * h;
}

double Kernel::eval1(double t, double s) const {
    switch (family_) {
        case Family::Separable:
            return xmul(f0_(t), f1_(s));
        case Family::Fractional: {
            if (coef_ == 0.0) return 0.0;
            const double a = pow0(t - s, alpha_[0] - 1.0);
            const double b = pow0(s - t0_, -beta_[0]);
            return xmul(coef_, xmul(a, b));
        }
        case Family::TransformedFractional: {
            const double ps = f0_(s), pt = f0_(t), p0 = f0_(t0_);
            const double dot = f1_(s);
            double acc = 0.0;
            for (std::size_t j = 0; j < alpha_.size(); ++j)
                acc += xmul(pow0(pt - ps, alpha_[j] - 1.0), pow0(ps - p0, -beta_[j]));
            return xmul(dot, acc);
        }
        case Family::Sum: {
            double acc = 0.0;
            for (const auto& k : *children_) acc += k.eval1(t, s);
            return acc;
        }
        case Family::Product:
            if (children_->size() == 1 && !tail_) return (*children_)[0].eval1(t, s);
            throw std::domain_error("product kernel: scalar evaluation needs a one-axis product");
        case Family::Void:
            return f1_(s);
        case Family::Multiplicative:
            return std::exp(nu_mass(s, t));
    }
    return 0.0;
}

double Kernel::eval_point(const Point& t, const Point& s) const {
    if (family_ == Family::Product) {
        const auto& fs = *children_;
        double acc = 1.0;
        for (std::size_t i = 0; i < fs.size(); ++i) acc = xmul(acc, fs[i].eval1(t.at(i), s.at(i)));
        if (tail_) acc = xmul(acc, (*tail_)(s.at(fs.size())));
        return acc;
    }
    if (family_ == Family::Sum) {
        double acc = 0.0;
        for (const auto& k : *children_) acc += k.eval_point(t, s);
        return acc;
    }
    return eval1(t.at(0), s.at(0));
}

ExtReal Kernel::eval(const Domain& domain, const Point& t, const Point& s) const {
    if (!domain.contains(t) || !domain.contains(s)) throw std::domain_error("kernel eval: point outside the domain");
    if (!domain.leq(s, t)) throw std::domain_error("kernel eval: s is not <= t");
    const double v = eval_point(t, s);
    if (std::isnan(v) || v < 0.0) throw std::domain_error("kernel eval: kernel is negative or undefined");
    return ExtReal(v);
}

bool Kernel::monotone_declared(const Domain& domain) const {
    switch (family_) {
        case Family::Separable: {
            Monotone m = mono_;
            if (m == Monotone::Auto) {
                const Interval iv = domain.kind() == Domain::Kind::Interval ? domain.axes()[0]
                                    : domain.support()                      ? *domain.support()
                                                                            : Interval{0.0, 1.0};
                const int mm = f0_.monotonicity(iv.lo, iv.hi);
                m = mm == 0 ? Monotone::Constant : mm == 1 ? Monotone::Increasing : mm == -1 ? Monotone::Decreasing
                                                                                            : Monotone::None;
            }
            if (domain.kind() == Domain::Kind::Void) return m == Monotone::Constant;
            return m == Monotone::Constant || m == Monotone::Increasing;
        }
        case Family::Fractional:
            return alpha_[0] >= 1.0;
        case Family::TransformedFractional:
            return std::all_of(alpha_.begin(), alpha_.end(), [](double a) { return a >= 1.0; });
        case Family::Sum:
            return std::all_of(children_->begin(), children_->end(),
                               [&](const Kernel& k) { return k.monotone_declared(domain); });
        case Family::Product: {
            if (domain.kind() != Domain::Kind::Box) return false;
            const auto& fs = *children_;
            for (std::size_t i = 0; i < fs.size() && i < domain.ordered_dim(); ++i)
                if (!fs[i].monotone_declared(Domain::interval(domain.axes()[i].lo, domain.axes()[i].hi))) return false;
            return true;
        }
        case Family::Void:
            return true;
        case Family::Multiplicative: {
            if (domain.kind() != Domain::Kind::Interval) return false;
            const Interval iv = domain.axes()[0];
            return f0_.nonnegative_on(iv.lo, iv.hi);
        }
    }
    return false;
}

void Kernel::validate(double p) const {
    if (!(p >= 1.0)) throw ConfigError("kernel: p must be >= 1");
    switch (family_) {
        case Family::Fractional:
            if (!(beta_[0] + 1.0 - 1.0 / p < alpha_[0])) {
                std::ostringstream os;
                os << "fractional kernel: need beta + 1 - 1/p < alpha (alpha=" << alpha_[0] << ", beta=" << beta_[0]
                   << ", p=" << p << ")";
                throw ConfigError(os.str());
            }
            return;
        case Family::Sum:
        case Family::Product:
            for (const auto& k : *children_) k.validate(p);
            return;
        default:
            return;
    }
}

void Kernel::validate_domain(const Domain& domain) const {
    switch (family_) {
        case Family::Product: {
            if (domain.kind() != Domain::Kind::Box) throw ConfigError("product kernel needs a box domain");
            if (children_->size() != domain.ordered_dim())
                throw ConfigError("product kernel: one factor per box axis required");
            if (tail_.has_value() != domain.tail().has_value())
                throw ConfigError("product kernel: tail factor must be given exactly when the box has a tail axis");
            for (std::size_t i = 0; i < children_->size(); ++i)
                (*children_)[i].validate_domain(Domain::interval(domain.axes()[i].lo, domain.axes()[i].hi));
            return;
        }
        case Family::Sum:
            for (const auto& k : *children_) k.validate_domain(domain);
            return;
        case Family::Fractional:
        case Family::TransformedFractional:
            if (domain.kind() != Domain::Kind::Interval)
                throw ConfigError("fractional kernels need an interval domain");
            if (domain.axes()[0].lo < t0_) throw ConfigError("fractional kernel: t0 must not exceed the domain start");
            return;
        case Family::Multiplicative:
            if (domain.kind() != Domain::Kind::Interval) throw ConfigError("multiplicative kernel needs an interval domain");
            return;
        case Family::Separable:
        case Family::Void:
            if (domain.kind() == Domain::Kind::Box) throw ConfigError("box domains need a product kernel");
            return;
    }
}

AlphaBetaBounds Kernel::alpha_beta_bounds() const {
    std::vector<double> a, b;
    if (family_ == Family::Fractional || family_ == Family::TransformedFractional) {
        a = alpha_;
        b = beta_;
    } else if (family_ == Family::Sum) {
        for (const auto& k : *children_) {
            if (k.family() != Family::Fractional && k.family() != Family::TransformedFractional)
                throw ConfigError("alpha/beta bounds need fractional parts");
            a.insert(a.end(), k.alphas().begin(), k.alphas().end());
            b.insert(b.end(), k.betas().begin(), k.betas().end());
        }
    } else {
        throw ConfigError("alpha/beta bounds need a fractional kernel");
    }
    AlphaBetaBounds r;
    r.alpha0 = *std::min_element(a.begin(), a.end());
    r.alpha_inf = *std::max_element(a.begin(), a.end());
    r.beta0 = *std::min_element(b.begin(), b.end());
    r.beta_inf = *std::max_element(b.begin(), b.end());
    return r;
}

bool Kernel::is_constant(double* c) const {
    if (family_ != Family::Separable || !f0_.is_constant() || !f1_.is_constant()) return false;
    if (c) *c = f0_.param(0) * f1_.param(0);
    return true;
}

bool Kernel::diagonal_singular(double p) const {
    switch (family_) {
        case Family::Fractional:
            return (alpha_[0] - 1.0) * p < 0.0 && coef_ > 0.0;
        case Family::TransformedFractional:
            return std::any_of(alpha_.begin(), alpha_.end(), [](double a) { return a < 1.0; });
        case Family::Sum:
        case Family::Product:
            return std::any_of(children_->begin(), children_->end(),
                               [&](const Kernel& k) { return k.diagonal_singular(p); });
        default:
            return false;
    }
}

std::vector<Triple> sample_triples(const Domain& domain, int count, std::uint64_t seed, const Measure* measure) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Triple> out;
    out.reserve(count);
    for (int c = 0; c < count; ++c) {
        Triple tr;
        if (domain.kind() == Domain::Kind::Void) {
            auto draw = [&]() {
                if (measure && measure->kind() == Measure::Kind::Discrete) {
                    const auto& at = measure->atoms();
                    return at[static_cast<std::size_t>(u01(rng) * at.size()) % at.size()].point;
                }
                const Interval iv = domain.support().value_or(Interval{0.0, 1.0});
                return iv.lo + (iv.hi - iv.lo) * u01(rng);
            };
            tr.s = {draw()};
            tr.s_mid = {draw()};
            tr.t = {draw()};
        } else {
            for (const auto& iv : domain.axes()) {
                double v[3] = {u01(rng), u01(rng), u01(rng)};
                std::sort(v, v + 3);
                tr.s.push_back(iv.lo + (iv.hi - iv.lo) * v[0]);
                tr.s_mid.push_back(iv.lo + (iv.hi - iv.lo) * v[1]);
                tr.t.push_back(iv.lo + (iv.hi - iv.lo) * v[2]);
            }
            if (domain.tail()) {
                const Interval iv = *domain.tail();
                tr.s.push_back(iv.lo + (iv.hi - iv.lo) * u01(rng));
                tr.s_mid.push_back(iv.lo + (iv.hi - iv.lo) * u01(rng));
                tr.t.push_back(iv.lo + (iv.hi - iv.lo) * u01(rng));
            }
        }
        out.push_back(std::move(tr));
    }
    return out;
}

MonotoneReport check_monotone(const Kernel& kernel, const Domain& domain, int samples, std::uint64_t seed,
                              const Measure* measure) {
    if (samples < 1) throw ConfigError("check_monotone: samples must be >= 1");
    MonotoneReport rep;
    for (const Triple& tr : sample_triples(domain, samples, seed, measure)) {
        ++rep.samples;
        const double lo = kernel.eval_point(tr.s_mid, tr.s);
        const double hi = kernel.eval_point(tr.t, tr.s);
        if (lo == hi) continue;
        if (lo > hi * (1.0 + 1e-12) + 1e-300) {
            rep.pass = false;
            rep.s = tr.s;
            rep.s_mid = tr.s_mid;
            rep.t = tr.t;
            rep.k_mid = lo;
            rep.k_top = hi;
            return rep;
        }
    }
    return rep;
}

double submultiplicative_defect(const Kernel& kernel, const Domain& domain, const std::vector<Triple>& triples) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Triple& tr : triples) {
        if (!domain.leq(tr.s, tr.s_mid) || !domain.leq(tr.s_mid, tr.t))
            throw ConfigError("submultiplicative_defect: triples must be ordered");
        const double lhs = xmul(kernel.eval_point(tr.t, tr.s_mid), kernel.eval_point(tr.s_mid, tr.s));
        const double rhs = kernel.eval_point(tr.t, tr.s);
        double d;
        if (std::isinf(lhs) && std::isinf(rhs)) d = 0.0;
        else if (lhs == rhs) d = 0.0;
        else d = lhs - rhs;
        worst = std::max(worst, d);
    }
    return triples.empty() ? 0.0 : worst;
}

}  // namespace volres
