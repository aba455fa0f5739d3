#include "volres/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "volres/errors.hpp"
#include "volres/quadrature.hpp"
#include "volres/resolvent.hpp"

namespace volres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInnerTol = 1e-12;
constexpr int kMaxTerms = 400;

double powp(double v, double p) {
    if (p == 1.0 || v == 0.0) return v;
    if (v == kInf) return kInf;
    return std::pow(v, p);
}

double rootp(double v, double p) { return powp(v, 1.0 / p); }

double finite_or_inf(const QuadResult& q) { return q.value.is_finite() ? q.value.value() : kInf; }

bool void_shaped(const Kernel& k) {
    return k.family() == Kernel::Family::Void || (k.family() == Kernel::Family::Separable && k.k0().is_constant());
}

// l1(s) of a void-shaped kernel (constant k0 folded in).
double void_factor(const Kernel& k, double s) {
    if (k.family() == Kernel::Family::Void) return k.k1()(s);
    return xmul(k.k0()(0.0), k.k1()(s));
}

double void_integral(const Domain& d, const Measure& m, const std::function<double(double)>& f) {
    Region whole;
    whole.whole = true;
    if (d.support()) whole.ranges = {*d.support()};
    return finite_or_inf(integrate([&](const Point& x) { return f(x[0]); }, whole, d, m, kInnerTol));
}

// sum_{n >= first} (K^n / (n!)^m)^(1/p), m >= 1, with its certified remainder folded in.
double factorial_tail(double K, int m, double p, int first) {
    if (K <= 0.0) return first == 0 ? 1.0 : 0.0;
    if (K == kInf) return kInf;
    const double lk = std::log(K);
    const SeriesValue s =
        sum_log_concave([&](int n) { return (n * lk - m * std::lgamma(n + 1.0)) / p; }, first, 1e-16);
    if (s.divergent || !s.sum.is_finite()) return kInf;
    return s.sum.value() + s.tail_bound.value();
}

// Quadrature samples of an integrand h(s) against mu on I(t) together with
// K(s, t) = int_{[s,t]} k(t, r)^p mu(dr) at each point.
struct Samples {
    std::vector<double> w, h, K;

    double moment(int n) const {
        double acc = 0.0;
        for (std::size_t g = 0; g < w.size(); ++g) {
            if (w[g] == 0.0 || h[g] == 0.0) continue;
            const double kn = n == 0 ? 1.0 : std::pow(K[g], n);
            if (kn == 0.0) continue;
            if (h[g] == kInf || kn == kInf) return kInf;
            acc += w[g] * h[g] * kn;
        }
        return acc;
    }
};

class Evaluator {
public:
    Evaluator(const GronwallInput& in, const Point& t) : in_(in), t_(t), m_(in.m()) {
        const Domain& d = in.domain;
        if (d.kind() == Domain::Kind::Void) {
            Q_ = void_integral(d, in.measure, [&](double r) { return powp(void_factor(in.k, r), in.p); });
            Kt_ = Q_;
        } else if (d.kind() == Domain::Kind::Interval) {
            Kt_ = K1(0, in.k, d.axes()[0].lo);
        } else {
            axes_ = split_axes(d, in.measure);
            Kt_ = 1.0;
            for (std::size_t a = 0; a < d.ordered_dim(); ++a) Kt_ *= K1(a, in.k.parts()[a], d.axes()[a].lo);
            if (d.tail()) {
                const ScalarFn tf = in.k.tail_factor() ? *in.k.tail_factor() : ScalarFn::constant(1.0);
                const AxisMeasure& ta = axes_[d.ordered_dim()];
                tailQ_ = finite_or_inf(integrate_1d([&](double r) { return powp(tf(r), in.p); }, d.tail()->lo,
                                                    d.tail()->hi, ta.measure, kInnerTol));
                Kt_ *= tailQ_;
            }
        }
    }

    int m() const { return m_; }
    double Kt() const { return Kt_; }
    double Q() const { return Q_; }

    // k(t, s)^p
    double kp(const Point& s) const {
        if (in_.domain.kind() == Domain::Kind::Void) return powp(void_factor(in_.k, s[0]), in_.p);
        return powp(in_.k.eval_point(t_, s), in_.p);
    }

    double lp(const Point& s) const {
        if (!in_.l) return 0.0;
        if (in_.domain.kind() == Domain::Kind::Void) return powp(void_factor(*in_.l, s[0]), in_.p);
        return powp(in_.l->eval_point(t_, s), in_.p);
    }

    double K(const Point& s) {
        const Domain& d = in_.domain;
        if (d.kind() == Domain::Kind::Void) return Q_;
        if (d.kind() == Domain::Kind::Interval) return K1(0, in_.k, s[0]);
        double acc = tailQ_ < 0.0 ? 1.0 : tailQ_;
        for (std::size_t a = 0; a < d.ordered_dim(); ++a) acc = xmul(acc, K1(a, in_.k.parts()[a], s[a]));
        return acc;
    }

    Samples sample(const std::function<double(const Point&)>& h, int level) {
        const PointRule r = region_rule(lower_set(in_.domain, t_), in_.domain, in_.measure, level);
        Samples S;
        S.w = r.w;
        S.h.resize(r.size());
        S.K.resize(r.size());
        for (std::size_t g = 0; g < r.size(); ++g) {
            S.h[g] = h(r.x[g]);
            S.K[g] = S.h[g] == 0.0 ? 0.0 : K(r.x[g]);
        }
        return S;
    }

    bool exact_rule() const { return in_.measure.kind() == Measure::Kind::Discrete; }

    std::pair<int, int> levels() const {
        if (exact_rule()) return {0, 0};
        if (in_.domain.kind() == Domain::Kind::Box) return {0, 2};
        return {1, 8};
    }

private:
    // int_{[s, t_a]} k_a(t_a, r)^p mu_a(dr) on ordered axis a.
    double K1(std::size_t a, const Kernel& ka, double s) {
        auto& cache = cache_[a];
        auto it = cache.find(s);
        if (it != cache.end()) return it->second;
        const double ta = t_[a];
        const Measure& ma = axes_.empty() ? in_.measure : axes_[a].measure;
        double v = 0.0;
        if (ta > s)
            v = finite_or_inf(integrate_1d([&](double r) { return powp(ka.eval1(ta, r), in_.p); }, s, ta, ma,
                                           kInnerTol));
        cache.emplace(s, v);
        return v;
    }

    const GronwallInput& in_;
    Point t_;
    int m_;
    double Kt_ = 0.0, Q_ = 0.0, tailQ_ = -1.0;
    std::vector<AxisMeasure> axes_;
    std::map<std::size_t, std::map<double, double>> cache_;
};

struct Sum {
    double value = 0.0;
    double tail = 0.0;
};

// sum_{n >= 0} (M_n / (n!)^m)^(1/p) with M_n = int h K^n, closed after the
// certified remainder M_0^(1/p) sum_{n > N} (Kt^n / (n!)^m)^(1/p) drops below tol.
Sum factorial_moment_series(const Samples& S, double Kt, int m, double p, double tol) {
    Sum out;
    const double M0 = S.moment(0);
    if (M0 == 0.0) return out;
    if (M0 == kInf) return {kInf, kInf};
    for (int n = 0; n < kMaxTerms; ++n) {
        const double Mn = S.moment(n);
        out.value += rootp(std::exp(std::log(Mn) - m * std::lgamma(n + 1.0)), p);
        const double tail = rootp(M0, p) * factorial_tail(Kt, m, p, n + 1);
        out.tail = tail;
        if (tail <= tol * std::max(1.0, out.value)) return out;
    }
    return out;
}

// Adaptive pair of levels for a moment series.
Sum adaptive_series(Evaluator& ev, const std::function<double(const Point&)>& h, double p, double tol) {
    const auto [lo, hi] = ev.levels();
    Sum prev;
    bool have = false;
    for (int L = lo; L <= hi; ++L) {
        const Samples S = ev.sample(h, L);
        Sum cur = factorial_moment_series(S, ev.Kt(), ev.m(), p, tol);
        if (lo == hi) return cur;
        if (have) {
            const double diff = std::abs(cur.value - prev.value);
            if (!std::isfinite(cur.value) || diff <= tol * std::max(1.0, cur.value) || L == hi) {
                cur.tail += std::isfinite(diff) ? diff : 0.0;
                return cur;
            }
        }
        prev = cur;
        have = true;
    }
    return prev;
}

// Moments M_0..M_{count-1} of h at a converged level.
std::vector<double> adaptive_moments(Evaluator& ev, const std::function<double(const Point&)>& h, int count,
                                     double tol, double& err) {
    const auto [lo, hi] = ev.levels();
    std::vector<double> prev;
    err = 0.0;
    for (int L = lo; L <= hi; ++L) {
        const Samples S = ev.sample(h, L);
        std::vector<double> cur(count);
        for (int n = 0; n < count; ++n) cur[n] = S.moment(n);
        if (lo == hi) return cur;
        if (!prev.empty()) {
            double d = 0.0, scale = 1.0;
            for (int n = 0; n < count; ++n) {
                d = std::max(d, std::abs(cur[n] - prev[n]));
                scale = std::max(scale, std::abs(cur[n]));
            }
            if (d <= tol * scale || L == hi) {
                err = d;
                return cur;
            }
        }
        prev = std::move(cur);
    }
    return prev;
}

void check_shape(const Kernel& k, const GronwallInput& in, const char* name) {
    const Domain& d = in.domain;
    k.validate(in.p);
    if (d.kind() == Domain::Kind::Void) {
        if (!void_shaped(k)) throw ConfigError(std::string(name) + ": a void set needs a kernel of the form k1(s)");
        return;
    }
    k.validate_domain(d);
    if (d.kind() == Domain::Kind::Box && k.family() != Kernel::Family::Product)
        throw ConfigError(std::string(name) + ": a box needs a product kernel");
}

}  // namespace

void GronwallInput::validate() const {
    if (!(p >= 1.0)) throw ConfigError("gronwall: p must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("gronwall: tol must be positive");
    measure.validate(domain);
    check_shape(k, *this, "k");
    if (l) check_shape(*l, *this, "l");
    if (domain.kind() == Domain::Kind::Void) {
        const double Q =
            void_integral(domain, measure, [&](double r) { return powp(void_factor(k, r), p); });
        if (!(Q < 1.0)) throw ConfigError("gronwall: int k1^p must be < 1 on a void set");
        return;
    }
    for (const auto& ax : split_axes(domain, measure)) {
        if (ax.domain.kind() == Domain::Kind::Interval && !ax.measure.atomless())
            throw ConfigError("gronwall: ordered axes need an atomless measure");
    }
    if (!k.monotone_declared(domain)) throw ConfigError("gronwall: k must satisfy the monotonicity condition");
}

int GronwallInput::m() const {
    return domain.kind() == Domain::Kind::Void ? 0 : static_cast<int>(domain.ordered_dim());
}

double gronwall_v(const GronwallInput& in, const Point& t) {
    double v = in.v0 ? in.v0(t) : 0.0;
    if (!in.l) return v;
    double L;
    if (in.domain.kind() == Domain::Kind::Void) {
        L = void_integral(in.domain, in.measure, [&](double r) { return powp(void_factor(*in.l, r), in.p); });
    } else {
        const Kernel& l = *in.l;
        L = finite_or_inf(integrate([&](const Point& s) { return powp(l.eval_point(t, s), in.p); },
                                    lower_set(in.domain, t), in.domain, in.measure, kInnerTol));
    }
    return v + rootp(L, in.p);
}

double grid_sup_v0(const GronwallInput& in, const Point& t) {
    if (!in.v0) return 0.0;
    const int level = in.domain.kind() == Domain::Kind::Box ? std::min(in.grid_level, 4) : in.grid_level;
    const QuadratureGrid g = make_grid(in.domain, in.measure, level);
    double s = in.v0(t);
    for (const Point& x : g.nodes)
        if (in.domain.leq(x, t)) s = std::max(s, in.v0(x));
    return s;
}

BoundPoint gronwall_bound(const GronwallInput& in, const Point& t) {
    in.validate();
    if (!in.domain.contains(t)) throw ConfigError("gronwall: point outside the domain");
    Evaluator ev(in, t);
    const double p = in.p;
    const int m = ev.m();
    BoundPoint bp;
    bp.t = t;
    const double vt = gronwall_v(in, t);
    const double sv = grid_sup_v0(in, t);
    auto vp = [&](const Point& s) { return powp(gronwall_v(in, s), p); };

    if (m == 0) {
        // Fredholm type: K = Q everywhere, geometric series in closed form.
        const double rq = rootp(ev.Q(), p);
        const double A = void_integral(in.domain, in.measure, [&](double r) { return xmul(ev.kp({r}), vp({r})); });
        const double Lm = in.l ? void_integral(in.domain, in.measure, [&](double r) { return ev.lp({r}); }) : 0.0;
        bp.sharp = ExtReal(vt + rootp(A, p) / (1.0 - rq));
        bp.sup = ExtReal((sv + rootp(Lm, p)) / (1.0 - rq));
        bp.tail = 0.0;
        return bp;
    }

    const Sum sharp = adaptive_series(ev, [&](const Point& s) { return xmul(ev.kp(s), vp(s)); }, p, in.tol);
    const double geo = factorial_tail(ev.Kt(), m, p, 0);
    Sum lsum;
    if (in.l) lsum = adaptive_series(ev, [&](const Point& s) { return ev.lp(s); }, p, in.tol);
    const double sup = xmul(sv, geo) + lsum.value;
    bp.sharp = std::isfinite(vt + sharp.value) ? ExtReal(vt + sharp.value) : ExtReal::infinity();
    bp.sup = std::isfinite(sup) ? ExtReal(sup) : ExtReal::infinity();
    bp.tail = std::max(sharp.tail, lsum.tail + xmul(sv, 1e-16 * geo));
    return bp;
}

BoundCurve gronwall_curve(const GronwallInput& in, const std::vector<Point>& ts) {
    BoundCurve c;
    c.m = in.m();
    for (const Point& t : ts) {
        c.points.push_back(gronwall_bound(in, t));
        c.tail_bound = std::max(c.tail_bound, c.points.back().tail);
    }
    return c;
}

SequenceBound gronwall_sequence_bound(const GronwallInput& in, const PointFn& u0, int n, const Point& t) {
    if (n < 1) throw ConfigError("gronwall sequence: n must be >= 1");
    in.validate();
    if (!in.domain.contains(t)) throw ConfigError("gronwall: point outside the domain");
    Evaluator ev(in, t);
    const double p = in.p;
    const int m = ev.m();
    const double vt = gronwall_v(in, t);
    const double sv = grid_sup_v0(in, t);
    auto vp = [&](const Point& s) { return powp(gronwall_v(in, s), p); };
    auto up = [&](const Point& s) { return u0 ? powp(u0(s), p) : 0.0; };
    auto fact = [&](int i) { return m * std::lgamma(i + 1.0); };
    auto term = [&](double M, int i) {
        if (M == 0.0) return 0.0;
        if (M == kInf) return kInf;
        return rootp(std::exp(std::log(M) - fact(i)), p);
    };

    std::vector<double> Mv, Mu, Ml;
    if (m == 0) {
        const double Q = ev.Q();
        const double A = void_integral(in.domain, in.measure, [&](double r) { return xmul(ev.kp({r}), vp({r})); });
        const double U = void_integral(in.domain, in.measure, [&](double r) { return xmul(ev.kp({r}), up({r})); });
        const double Lm = in.l ? void_integral(in.domain, in.measure, [&](double r) { return ev.lp({r}); }) : 0.0;
        for (int i = 0; i < n; ++i) {
            const double qi = std::pow(Q, i);
            Mv.push_back(xmul(A, qi));
            Mu.push_back(xmul(U, qi));
            Ml.push_back(xmul(Lm, qi));
        }
    } else {
        double err = 0.0;
        Mv = adaptive_moments(ev, [&](const Point& s) { return xmul(ev.kp(s), vp(s)); }, n, in.tol, err);
        Mu = adaptive_moments(ev, [&](const Point& s) { return xmul(ev.kp(s), up(s)); }, n, in.tol, err);
        Ml = in.l ? adaptive_moments(ev, [&](const Point& s) { return ev.lp(s); }, n, in.tol, err)
                  : std::vector<double>(n, 0.0);
    }
    SequenceBound out;
    const double w = term(Mu[n - 1], n - 1);
    double sharp = vt + w, sup = w;
    for (int i = 0; i <= n - 2; ++i) sharp += term(Mv[i], i);
    for (int i = 0; i <= n - 1; ++i) {
        const double ki = ev.Kt() == 0.0 ? (i == 0 ? 1.0 : 0.0) : rootp(std::exp(i * std::log(ev.Kt()) - fact(i)), p);
        sup += xmul(sv, ki) + term(Ml[i], i);
    }
    out.w_n = std::isfinite(w) ? ExtReal(w) : ExtReal::infinity();
    out.sharp = std::isfinite(sharp) ? ExtReal(sharp) : ExtReal::infinity();
    out.sup = std::isfinite(sup) ? ExtReal(sup) : ExtReal::infinity();
    return out;
}

SeriesValue resolvent_bound(const PointFn& v, const Kernel& kernel, const Domain& domain, const Measure& measure,
                            double p, const Point& t, double tol, const EngineOptions& opt) {
    if (!v) {
        SeriesValue z;
        z.sum = ExtReal(0.0);
        z.tail_bound = ExtReal(0.0);
        z.converged = true;
        return z;
    }
    Weight w{v};
    LowerSetSeries ls = lower_set_series(kernel, domain, measure, p, t, w, tol, -1, opt);
    const double vt = v(t);
    SeriesValue s = ls.series;
    if (!std::isfinite(vt)) {
        s.sum = ExtReal::infinity();
        s.divergent = true;
        s.converged = false;
        return s;
    }
    s.sum = s.sum + ExtReal(vt);
    return s;
}

Vanishing check_vanishing(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                          const PointFn& u0, const Point& t, VanishingStrategy strategy,
                          std::optional<double> ess_bound, double tol) {
    if (!domain.contains(t)) throw ConfigError("check_vanishing: point outside the domain");
    auto bounded = [&]() {
        if (!ess_bound || !std::isfinite(*ess_bound)) return false;
        const int level = domain.kind() == Domain::Kind::Box ? 4 : 6;
        const QuadratureGrid g = make_grid(domain, measure, level);
        for (const Point& x : g.nodes)
            if (domain.leq(x, t) && u0 && u0(x) > *ess_bound) return false;
        const SeriesValue I = series_function_I(kernel, domain, measure, p, t, tol);
        return I.converged && I.sum.is_finite();
    };
    auto summable = [&]() {
        const Weight w{u0 ? u0 : PointFn([](const Point&) { return 0.0; })};
        const LowerSetSeries ls = lower_set_series(kernel, domain, measure, p, t, w, tol);
        return ls.series.converged && ls.series.sum.is_finite() && ls.series.tail_bound.is_finite();
    };
    try {
        if (strategy != VanishingStrategy::Summability && bounded()) return Vanishing::Vanishes;
        if (strategy != VanishingStrategy::EssentiallyBounded && summable()) return Vanishing::Vanishes;
    } catch (const std::exception&) {
        return Vanishing::Unknown;
    }
    return Vanishing::Unknown;
}

InductionResult induction_check(const GridOperator& psi, const std::vector<std::vector<double>>& sequence,
                                const std::vector<bool>& mask, double tol) {
    InductionResult r;
    if (sequence.empty()) return r;
    std::vector<double> it = sequence[0];
    for (std::size_t n = 1; n < sequence.size(); ++n) {
        it = psi(it);
        const auto& u = sequence[n];
        if (u.size() != it.size() || mask.size() != it.size())
            throw ConfigError("induction_check: size mismatch");
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!mask[i]) continue;
            if (u[i] > it[i] + tol) {
                r.pass = false;
                r.n = static_cast<int>(n);
                r.index = i;
                r.lhs = u[i];
                r.rhs = it[i];
                return r;
            }
        }
    }
    return r;
}

SeriesValue fractional_sup_bound(const std::vector<double>& alpha, const std::vector<double>& beta, double p,
                                 double k0_t, const std::vector<double>& x, double v_t, double sup_v, double tol) {
    if (alpha.size() != beta.size() || alpha.size() != x.size() || alpha.empty())
        throw ConfigError("fractional bound: alpha, beta and x must have equal nonzero length");
    double log_cb = 0.0, lin = 0.0;
    std::vector<double> a(alpha.size()), b(alpha.size());
    bool zero = !(k0_t > 0.0) || !(sup_v > 0.0);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        FractionalResolventParams fp{alpha[i], beta[i], p};
        fp.validate();
        a[i] = fp.alpha_p();
        b[i] = fp.beta_p();
        if (!(b[i] < 1.0)) throw ConfigError("fractional bound: beta p must be < 1");
        if (!(x[i] >= 0.0)) throw ConfigError("fractional bound: x must be nonnegative");
        if (x[i] == 0.0) zero = true;
        log_cb += std::lgamma(1.0 - b[i]) / p;
        if (!zero) lin += (std::lgamma(a[i]) + (a[i] - b[i]) * std::log(x[i])) / p;
    }
    SeriesValue out;
    if (zero) {
        out.sum = ExtReal(v_t);
        out.tail_bound = ExtReal(0.0);
        out.converged = true;
        return out;
    }
    const double lk = std::log(k0_t);
    const SeriesValue s = sum_log_concave(
        [&](int n) {
            double acc = n * (lk + lin);
            for (std::size_t i = 0; i < a.size(); ++i) acc -= std::lgamma((a[i] - b[i]) * n + 1.0) / p;
            return acc;
        },
        1, tol);
    const double c = fractional_lp_constant(alpha, beta, p) * std::exp(log_cb) * sup_v;
    out = s;
    out.sum = ExtReal(v_t) + (s.sum.is_finite() ? ExtReal(c * s.sum.value()) : ExtReal::infinity());
    out.tail_bound = s.tail_bound.is_finite() ? ExtReal(c * s.tail_bound.value()) : ExtReal::infinity();
    return out;
}

}  // namespace volres
