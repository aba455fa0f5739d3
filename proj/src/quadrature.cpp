#include "volres/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <mutex>

#include "volres/errors.hpp"

namespace volres {

namespace {

constexpr double kRatio = 0.2;
constexpr double kOverflow = 1e300;
constexpr int kMaxLevel = 10;

Rule compute_gauss_legendre(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

// Cell boundaries on [a, c] shrinking geometrically towards a.
std::vector<double> graded_edges(double a, double c, int layers) {
    std::vector<double> e;
    e.push_back(a);
    // offsets below the resolution of doubles near a would put nodes on a itself
    const double floor = 4096.0 * std::numeric_limits<double>::epsilon() * std::abs(a);
    for (int j = layers; j >= 0; --j) {
        const double off = (c - a) * std::pow(kRatio, j);
        if (j > 0 && std::abs(off) <= floor) continue;
        e.push_back(a + off);
    }
    return e;
}

void append_cells(Rule& r, const std::vector<double>& edges, int points, int split = 1) {
    const Rule& g = gauss_legendre(points);
    for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
        const double lo = edges[c], hi = edges[c + 1];
        for (int s = 0; s < split; ++s) {
            const double a = lo + (hi - lo) * s / split;
            const double b = lo + (hi - lo) * (s + 1) / split;
            const double h = 0.5 * (b - a), m = 0.5 * (a + b);
            for (std::size_t q = 0; q < g.size(); ++q) {
                r.x.push_back(m + h * g.x[q]);
                r.w.push_back(h * g.w[q]);
            }
        }
    }
}

// Graded rule on [0, half] for int x^(gamma-1) g(x) dx, returning nodes x and
// weights that already include x^(gamma-1) (but not the other endpoint factor).
void singular_half(double gamma, double half, int layers, int points, int split, std::vector<double>& xs,
                   std::vector<double>& ws) {
    Rule r;
    if (gamma < 1.0) {
        append_cells(r, graded_edges(0.0, std::pow(half, gamma), layers), points, split);
        for (std::size_t i = 0; i < r.size(); ++i) {
            xs.push_back(std::pow(r.x[i], 1.0 / gamma));
            ws.push_back(r.w[i] / gamma);
        }
    } else {
        append_cells(r, graded_edges(0.0, half, layers), points, split);
        for (std::size_t i = 0; i < r.size(); ++i) {
            xs.push_back(r.x[i]);
            ws.push_back(r.w[i] * std::pow(r.x[i], gamma - 1.0));
        }
    }
}

QuadStatus classify(double err, double value, double tol) {
    return err <= tol * std::max(1.0, std::abs(value)) ? QuadStatus::Converged : QuadStatus::UnknownAccuracy;
}

bool all_discrete(const Domain& domain, const Measure& measure) {
    if (measure.kind() == Measure::Kind::Discrete) return true;
    if (measure.kind() != Measure::Kind::Product) return false;
    for (const auto& ax : split_axes(domain, measure))
        if (ax.measure.kind() != Measure::Kind::Discrete) return false;
    return true;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    if (n < 1 || n > 64) throw ConfigError("gauss_legendre: 1 <= n <= 64 required");
    static const std::array<Rule, 65> table = [] {
        std::array<Rule, 65> t;
        for (int k = 1; k <= 64; ++k) t[k] = compute_gauss_legendre(k);
        return t;
    }();
    return table[n];
}

Rule graded_rule(double a, double b, int layers, bool grade_left, bool grade_right, int points) {
    if (!(a <= b)) throw ConfigError("graded_rule: a <= b required");
    Rule r;
    if (a == b) return r;
    if (grade_left && grade_right) {
        const double m = 0.5 * (a + b);
        auto left = graded_edges(a, m, layers);
        append_cells(r, left, points);
        auto right = graded_edges(b, m, layers);
        std::vector<double> rev(right.rbegin(), right.rend());
        append_cells(r, rev, points);
    } else if (grade_left) {
        append_cells(r, graded_edges(a, b, layers), points);
    } else if (grade_right) {
        auto e = graded_edges(b, a, layers);
        std::vector<double> rev(e.rbegin(), e.rend());
        append_cells(r, rev, points);
    } else {
        std::vector<double> e;
        const int n = std::max(1, layers);
        for (int i = 0; i <= n; ++i) e.push_back(a + (b - a) * i / n);
        append_cells(r, e, points);
    }
    return r;
}

Rule measure_rule(double a, double b, const Measure& measure, int level) {
    Rule r;
    switch (measure.kind()) {
        case Measure::Kind::Lebesgue:
        case Measure::Kind::Weighted: {
            if (a == b) return r;
            r = graded_rule(a, b, 4 * (level + 1));
            if (measure.kind() == Measure::Kind::Weighted)
                for (std::size_t i = 0; i < r.size(); ++i) r.w[i] *= measure.density(r.x[i]);
            return r;
        }
        case Measure::Kind::Discrete:
            for (const auto& at : measure.atoms())
                if (at.point >= a && at.point <= b) {
                    r.x.push_back(at.point);
                    r.w.push_back(at.mass);
                }
            return r;
        case Measure::Kind::Product:
            break;
    }
    throw ConfigError("measure_rule: a one-dimensional measure is required");
}

PointRule region_rule(const Region& region, const Domain& domain, const Measure& measure, int level) {
    std::vector<Rule> axes;
    if (domain.kind() == Domain::Kind::Void) {
        if (measure.kind() == Measure::Kind::Discrete) {
            axes.push_back(measure_rule(-std::numeric_limits<double>::infinity(),
                                        std::numeric_limits<double>::infinity(), measure, level));
        } else {
            const Interval sp = domain.support().value();
            axes.push_back(measure_rule(sp.lo, sp.hi, measure, level));
        }
    } else {
        const auto parts = split_axes(domain, measure);
        if (region.ranges.size() != parts.size()) throw ConfigError("region_rule: region does not match the domain");
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const Interval iv = region.ranges[i];
            if (iv.lo > iv.hi) throw ConfigError("region_rule: empty range");
            axes.push_back(measure_rule(iv.lo, iv.hi, parts[i].measure, level));
        }
    }
    PointRule out;
    out.x.push_back({});
    out.w.push_back(1.0);
    for (const Rule& r : axes) {
        PointRule next;
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t q = 0; q < r.size(); ++q) {
                Point p = out.x[i];
                p.push_back(r.x[q]);
                next.x.push_back(std::move(p));
                next.w.push_back(out.w[i] * r.w[q]);
            }
        out = std::move(next);
    }
    return out;
}

QuadResult integrate(const Integrand& f, const Region& region, const Domain& domain, const Measure& measure,
                     double tol) {
    if (!(tol > 0.0)) throw ConfigError("integrate: tol must be positive");
    auto eval = [&](int level) {
        const PointRule r = region_rule(region, domain, measure, level);
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r.w[i] == 0.0) continue;
            const double v = f(r.x[i]);
            if (std::isnan(v)) throw std::domain_error("integrate: integrand returned NaN");
            if (v < 0.0) throw std::domain_error("integrate: integrand must be nonnegative");
            s += r.w[i] * v;
        }
        return s;
    };
    QuadResult res;
    auto finish = [&](double value, double err, QuadStatus st, int level) {
        res.level = level;
        if (!std::isfinite(value) || value > kOverflow) {
            res.value = ExtReal::infinity();
            res.err_est = std::numeric_limits<double>::infinity();
            res.status = QuadStatus::Divergent;
        } else {
            res.value = ExtReal(value);
            res.err_est = err;
            res.status = st;
        }
        return res;
    };
    if (all_discrete(domain, measure)) return finish(eval(0), 0.0, QuadStatus::Converged, 0);
    double prev = eval(0);
    if (!std::isfinite(prev) || prev > kOverflow) return finish(prev, 0.0, QuadStatus::Divergent, 0);
    double err = std::numeric_limits<double>::infinity();
    double cur = prev;
    for (int level = 1; level <= kMaxLevel; ++level) {
        cur = eval(level);
        if (!std::isfinite(cur) || cur > kOverflow) return finish(cur, 0.0, QuadStatus::Divergent, level);
        err = std::abs(cur - prev) + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(cur);
        if (classify(err, cur, tol) == QuadStatus::Converged) return finish(cur, err, QuadStatus::Converged, level);
        prev = cur;
    }
    return finish(cur, err, QuadStatus::UnknownAccuracy, kMaxLevel);
}

QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b, const Measure& measure,
                        double tol) {
    Domain d = Domain::interval(std::min(a, b - 1.0), std::max(b, a + 1.0));
    if (a < b) d = Domain::interval(a, b);
    Region r{{Interval{a, b}}, false};
    return integrate([&](const Point& x) { return f(x[0]); }, r, d, measure, tol);
}

Rule singular_rule(double gamma, double delta, int layers, int points) {
    if (!(gamma > 0.0) || !(delta > 0.0)) throw ConfigError("singular_rule: exponents must be positive");
    const int split = 1 + static_cast<int>(std::max(gamma, delta) / 10.0);
    Rule r;
    std::vector<double> xs, ws;
    singular_half(gamma, 0.5, layers, points, split, xs, ws);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        r.x.push_back(xs[i]);
        r.w.push_back(ws[i] * std::pow(1.0 - xs[i], delta - 1.0));
    }
    xs.clear();
    ws.clear();
    singular_half(delta, 0.5, layers, points, split, xs, ws);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        r.x.push_back(1.0 - xs[i]);
        r.w.push_back(ws[i] * std::pow(1.0 - xs[i], gamma - 1.0));
    }
    return r;
}

QuadResult integrate_singular(const std::function<double(double)>& f_regular, double gamma, double delta,
                              double tol) {
    if (!(gamma > 0.0) || !(delta > 0.0))
        throw ConfigError("integrate_singular: exponents gamma and delta must be positive");
    if (!(tol > 0.0)) throw ConfigError("integrate_singular: tol must be positive");
    auto eval = [&](int layers) {
        const Rule r = singular_rule(gamma, delta, layers, 16);
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * f_regular(r.x[i]);
        return s;
    };
    QuadResult res;
    double prev = eval(6);
    double cur = prev, err = std::numeric_limits<double>::infinity();
    int layers = 6;
    for (layers = 10; layers <= 42; layers += 4) {
        cur = eval(layers);
        err = std::abs(cur - prev) + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(cur);
        if (err <= tol * std::max(1.0, std::abs(cur))) break;
        prev = cur;
    }
    res.level = layers;
    res.err_est = err;
    res.status = classify(err, cur, tol);
    if (!std::isfinite(cur) || std::abs(cur) > kOverflow) {
        res.value = ExtReal::infinity();
        res.status = QuadStatus::Divergent;
    } else {
        res.value = to_ext(cur, 1e-300);
    }
    return res;
}

}  // namespace volres
