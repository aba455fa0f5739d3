#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "volres/extreal.hpp"
#include "volres/kernels.hpp"
#include "volres/measure.hpp"
#include "volres/specfun.hpp"
#include "volres/volterra_weights.hpp"

namespace volres {

using PointFn = std::function<double(const Point&)>;

/// Data of the Gronwall inequalities
///   u(t) <= v0(t) + (int l(t,s)^p mu(ds))^(1/p) + (int k(t,s)^p u(s)^p mu(ds))^(1/p).
///
/// The kernel k must satisfy the monotonicity condition on an interval or a
/// box with atomless axis measures (product kernel on boxes), or be a void
/// kernel k1(s) on a void set. l, when present, has the same shape.
struct GronwallInput {
    Kernel k = Kernel::constant(1.0);
    std::optional<Kernel> l;
    Domain domain = Domain::interval(0.0, 1.0);
    Measure measure = Measure::lebesgue();
    double p = 1.0;
    PointFn v0;          // empty means 0
    int grid_level = 6;  // grid used for the sup of v0 over I(t)
    double tol = 1e-10;

    /// Checks the shape conditions; throws ConfigError.
    void validate() const;
    /// 0 for a void set, the number of ordered axes otherwise.
    int m() const;
};

/// v(t) = v0(t) + (int_{I(t)} l(t,s)^p mu(ds))^(1/p).
double gronwall_v(const GronwallInput& in, const Point& t);

/// sup of v0 over the grid nodes in I(t) and t itself.
double grid_sup_v0(const GronwallInput& in, const Point& t);

struct BoundPoint {
    Point t;
    ExtReal sharp;      // v(t) + sum_n (n!)^(-m/p) (int k^p K^n v^p)^(1/p)
    ExtReal sup;        // sup-form majorant
    double tail = 0.0;  // truncation plus quadrature allowance on either line
};

struct BoundCurve {
    std::vector<BoundPoint> points;
    double tail_bound = 0.0;
    int m = 0;
};

/// Both lines of the Gronwall inequality at t. K(s,t) = int_{[s,t]} k(t,r)^p mu(dr).
/// For m = 0 the geometric series are summed in closed form (infinite when
/// (int k1^p)^(1/p) >= 1).
BoundPoint gronwall_bound(const GronwallInput& in, const Point& t);

BoundCurve gronwall_curve(const GronwallInput& in, const std::vector<Point>& ts);

struct SequenceBound {
    ExtReal sharp;  // v + w_n + sum_{i <= n-2} (i!)^(-m/p) (int k^p K^i v^p)^(1/p)
    ExtReal sup;    // sup-form
    ExtReal w_n;
};

/// Bound of the n-th member of a sequence with u_n <= v + (int k^p u_{n-1}^p)^(1/p).
SequenceBound gronwall_sequence_bound(const GronwallInput& in, const PointFn& u0, int n, const Point& t);

/// v(t) + sum_n (int_{I(t)} R_{k^p,mu,n}(t,s) v(s)^p mu(ds))^(1/p).
SeriesValue resolvent_bound(const PointFn& v, const Kernel& kernel, const Domain& domain, const Measure& measure,
                            double p, const Point& t, double tol, const EngineOptions& opt = {});

enum class Vanishing { Vanishes, Unknown };

enum class VanishingStrategy {
    EssentiallyBounded,  // declared ess sup of u0 and a finite series function
    Summability,         // sum_n (int R_{k^p,mu,n} u0^p)^(1/p) < inf with a certified tail
    Any,
};

/// Whether int_{I(t)} R_{k^p,mu,n}(t,s) u0(s)^p mu(ds) -> 0 follows from a
/// recognised criterion. `ess_bound` is the caller's declared bound of u0 on
/// I(t); grid samples above it make the answer Unknown.
Vanishing check_vanishing(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                          const PointFn& u0, const Point& t, VanishingStrategy strategy,
                          std::optional<double> ess_bound = std::nullopt, double tol = 1e-10);

struct InductionResult {
    bool pass = true;
    int n = 0;              // first failing iterate
    std::size_t index = 0;  // failing grid index
    double lhs = 0.0;       // u_n at the witness
    double rhs = 0.0;       // Psi^n(u_0) at the witness
};

using GridOperator = std::function<std::vector<double>(const std::vector<double>&)>;

/// Checks u_n <= Psi^n(u_0) (+ tol) on the masked indices for every given n.
InductionResult induction_check(const GridOperator& psi, const std::vector<std::vector<double>>& sequence,
                                const std::vector<bool>& mask, double tol = 0.0);

/// Sup-form bound of the multivariate fractional resolvent inequality for
/// k(t,s) = k0(t) prod_i (t_i - s_i)^(alpha_i - 1) (s_i - t_{i,0})^(-beta_i),
/// beta_i p < 1:
///   v_t + sup_v c c_beta sum_n k0^n prod_i (Gamma(a_i) x_i^(a_i - b_i))^(n/p)
///                               / Gamma((a_i - b_i) n + 1)^(1/p)
/// with a_i = (alpha_i - 1) p + 1, b_i = beta_i p, x_i = t_i - t_{i,0} and
/// c = fractional_lp_constant (valid, possibly non-optimal).
SeriesValue fractional_sup_bound(const std::vector<double>& alpha, const std::vector<double>& beta, double p,
                                 double k0_t, const std::vector<double>& x, double v_t, double sup_v, double tol);

}  // namespace volres
