#pragma once

#include <functional>
#include <vector>

#include "volres/extreal.hpp"
#include "volres/measure.hpp"

namespace volres {

/// Nodes and weights of a one-dimensional rule.
struct Rule {
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
};

/// Points and weights of a rule on a region of a (possibly multi-axis) domain.
struct PointRule {
    std::vector<Point> x;
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], 1 <= n <= 64.
const Rule& gauss_legendre(int n);

/// Composite Gauss-Legendre rule on [a, b] whose cells shrink geometrically
/// (ratio 0.2) towards each graded endpoint; `layers` cells per graded side.
Rule graded_rule(double a, double b, int layers, bool grade_left = true, bool grade_right = true,
                 int points = 16);

/// Graded rule on [a, b] against a one-dimensional measure: Lebesgue and
/// weighted measures use graded_rule with `layers` = 4 (level + 1); a
/// discrete measure yields its atoms in [a, b] (exact).
Rule measure_rule(double a, double b, const Measure& measure, int level);

/// Tensor product of per-axis measure rules over a region.
PointRule region_rule(const Region& region, const Domain& domain, const Measure& measure, int level);

enum class QuadStatus { Converged, UnknownAccuracy, Divergent };

struct QuadResult {
    ExtReal value;
    double err_est = 0.0;
    QuadStatus status = QuadStatus::Converged;
    int level = 0;
};

using Integrand = std::function<double(const Point&)>;

/// Integral of a nonnegative f over a region by graded composite
/// Gauss-Legendre rules, refined level by level until the two-level
/// difference |Q_L - Q_{L-1}| <= tol * max(1, |Q_L|). Discrete measures are
/// summed exactly. Results above 1e300 are reported as Infinity/Divergent.
QuadResult integrate(const Integrand& f, const Region& region, const Domain& domain, const Measure& measure,
                     double tol);

/// Convenience wrapper for [a, b] with a one-dimensional measure.
QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b, const Measure& measure,
                        double tol);

/// Rule with sum_g w_g f(x_g) ~ int_0^1 x^(gamma-1) (1-x)^(delta-1) f(x) dx for
/// continuous f. Endpoint singularities are absorbed by the substitution
/// x = u^(1/gamma) (mirrored on the right) followed by geometric grading.
Rule singular_rule(double gamma, double delta, int layers = 20, int points = 12);

/// int_0^1 x^(gamma-1) (1-x)^(delta-1) f(x) dx with a two-level error estimate.
/// Throws ConfigError for nonpositive exponents.
QuadResult integrate_singular(const std::function<double(double)>& f_regular, double gamma, double delta,
                              double tol = 1e-13);

}  // namespace volres
