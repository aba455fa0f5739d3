#include "volres/specfun.hpp"

#include <cmath>
#include <limits>

#include "volres/errors.hpp"

namespace volres {

namespace {

constexpr double kLnSqrt2Pi = 0.91893853320467274178;

// Stirling series for ln Gamma(x), x >= 15; coefficients B_{2k}/(2k(2k-1)).
double stirling(double x) {
    static const double c[] = {1.0 / 12.0,          -1.0 / 360.0,         1.0 / 1260.0,   -1.0 / 1680.0,
                               1.0 / 1188.0,        -691.0 / 360360.0,    1.0 / 156.0,    -3617.0 / 122400.0};
    const double inv = 1.0 / x, inv2 = inv * inv;
    double s = 0.0, pw = inv;
    for (double ci : c) {
        s += ci * pw;
        pw *= inv2;
    }
    return (x - 0.5) * std::log(x) - x + kLnSqrt2Pi + s;
}

}  // namespace

double ln_gamma(double x) {
    if (!(x > 0.0)) throw ConfigError("ln_gamma: argument must be positive");
    if (std::isinf(x)) return x;
    if (x >= 15.0) return stirling(x);
    // Shift up with Gamma(x) = Gamma(x + k) / (x (x+1) ... (x+k-1)).
    double prod = 1.0, shift = 0.0;
    double y = x;
    while (y < 15.0) {
        prod *= y;
        if (prod > 1e280) {
            shift += std::log(prod);
            prod = 1.0;
        }
        y += 1.0;
    }
    return stirling(y) - std::log(prod) - shift;
}

double gamma_fn(double x) { return std::exp(ln_gamma(x)); }

double digamma(double x) {
    if (!(x > 0.0)) throw ConfigError("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 12.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})
    const double series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    return acc + std::log(x) - 0.5 * inv - series;
}

double ln_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("beta: arguments must be positive");
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
}

double beta(double a, double b) { return std::exp(ln_beta(a, b)); }

GammaMin gamma_min_point() {
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (digamma(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    const double x = 0.5 * (lo + hi);
    return {x, gamma_fn(x)};
}

SeriesValue sum_log_concave(const std::function<double(int)>& log_term, int first, double tol, int max_terms) {
    if (!(tol > 0.0)) throw ConfigError("series: tol must be positive");
    SeriesValue out;
    double sum = 0.0;
    double prev = -1.0;
    for (int k = 0; k < max_terms; ++k) {
        const int n = first + k;
        const double lt = log_term(n);
        if (std::isnan(lt)) throw std::domain_error("series: NaN term");
        if (lt > 700.0) {
            out.sum = ExtReal::infinity();
            out.tail_bound = ExtReal::infinity();
            out.terms_used = k + 1;
            out.divergent = true;
            return out;
        }
        const double term = std::exp(lt);
        sum += term;
        out.terms_used = k + 1;
        if (!std::isfinite(sum)) {
            out.sum = ExtReal::infinity();
            out.tail_bound = ExtReal::infinity();
            out.divergent = true;
            return out;
        }
        if (term == 0.0 && (prev > 0.0 || k >= 3)) {
            // a log-concave sequence has no positive terms after a zero one
            out.sum = ExtReal(sum);
            out.tail_bound = ExtReal();
            out.converged = true;
            return out;
        }
        if (prev > 0.0) {
            const bool small = term < tol * std::max(1.0, sum);
            const bool ratio_ok = term < 0.5 * prev;
            if (small && ratio_ok) {
                out.sum = ExtReal(sum);
                out.tail_bound = ExtReal(2.0 * term);
                out.converged = true;
                return out;
            }
        }
        prev = term;
    }
    out.sum = ExtReal(sum);
    out.tail_bound = ExtReal::infinity();
    return out;
}

SeriesValue mittag_leffler(const MLParams& params, double z, double tol) {
    if (!(params.alpha > 0.0) || !(params.beta >= 0.0) || !(params.p >= 1.0))
        throw ConfigError("mittag_leffler: need alpha > 0, beta >= 0, p >= 1");
    if (!(z >= 0.0)) throw ConfigError("mittag_leffler: z must be >= 0");
    if (!(tol > 0.0)) throw ConfigError("mittag_leffler: tol must be positive");
    const double a = params.alpha, b = params.beta, p = params.p;
    const double lz = z > 0.0 ? std::log(z) : -std::numeric_limits<double>::infinity();
    auto lt = [&](int n) {
        if (n == 0) return b > 0.0 ? -ln_gamma(b) / p : -std::numeric_limits<double>::infinity();
        if (z == 0.0) return -std::numeric_limits<double>::infinity();
        return n * lz - ln_gamma(a * n + b) / p;
    };
    if (z == 0.0) {
        SeriesValue out;
        out.sum = ExtReal(std::exp(lt(0)));
        out.tail_bound = ExtReal();
        out.terms_used = 1;
        out.converged = true;
        return out;
    }
    // The n = 0 term is handled separately so that the ratio test only runs on
    // the log-concave part n >= 1.
    SeriesValue s = sum_log_concave(lt, 1, tol);
    s.sum += ExtReal(std::exp(lt(0)));
    s.terms_used += 1;
    return s;
}

}  // namespace volres
