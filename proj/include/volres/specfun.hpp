#pragma once

#include <functional>

#include "volres/extreal.hpp"

namespace volres {

/// Truncated nonnegative series. When `converged`, the exact sum lies in
/// [sum, sum + tail_bound].
struct SeriesValue {
    ExtReal sum;
    ExtReal tail_bound;
    int terms_used = 0;
    bool converged = false;
    bool divergent = false;
};

double ln_gamma(double x);
double gamma_fn(double x);
double digamma(double x);
double beta(double a, double b);
double ln_beta(double a, double b);

struct GammaMin {
    double x_gamma;
    double gamma_at_min;
};

/// The minimum point of Gamma on (0, inf), found by bisection on the sign of
/// digamma over (1, 2).
GammaMin gamma_min_point();

struct MLParams {
    double alpha = 1.0;
    double beta = 1.0;
    double p = 1.0;
};

/// E_{alpha,beta,p}(z) = sum_{n>=0} z^n / Gamma(alpha n + beta)^(1/p) for z >= 0.
/// With beta = 0 the n = 0 coefficient is 0. Summation stops once a term is
/// below tol * max(1, sum) and the ratio of the last two terms is below 1/2;
/// the tail bound is twice the last term.
SeriesValue mittag_leffler(const MLParams& params, double z, double tol);

/// Sum of exp(log_term(n)) for n >= first, for terms whose ratio
/// term(n+1)/term(n) is nonincreasing in n (log-concave sequences). Uses the
/// same stopping rule and tail bound as mittag_leffler. log_term may return
/// -inf for a zero term.
SeriesValue sum_log_concave(const std::function<double(int)>& log_term, int first, double tol,
                            int max_terms = 100000);

}  // namespace volres
