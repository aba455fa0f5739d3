#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "volres/extreal.hpp"
#include "volres/kernels.hpp"
#include "volres/measure.hpp"
#include "volres/volterra_weights.hpp"

namespace volres {

/// Values of a function at the nodes of a QuadratureGrid.
using GridFn = std::vector<double>;

/// An evolution operator Psi on grid functions with a declared Lipschitz
/// kernel lambda:  d_t(Psi x, Psi y)^p <= int_{I(t)} lambda(t,s)^p Lambda(s,x,y)^p mu(ds)
/// with Lambda <= d. The caller guarantees this contract.
struct EvolutionOperatorSpec {
    std::function<GridFn(const GridFn&)> apply;
    Kernel lambda_kernel = Kernel::constant(1.0);
    QuadratureGrid grid;
    double p = 1.0;
    /// Pointwise metric on values; |a - b| when empty.
    std::function<double(double, double)> metric;
    /// Optional tighter Lambda(s, x, y) at the nodes; d_s(x, y) when empty.
    std::function<GridFn(const GridFn&, const GridFn&)> lambda_profile;
};

/// d_t(x, y) = max over nodes s <= t of metric(x(s), y(s)), for every node t.
GridFn distance_profile(const EvolutionOperatorSpec& op, const GridFn& x, const GridFn& y);

struct PicardCertificate {
    int iterates = 0;                     // last computed iterate index
    std::vector<std::vector<double>> B;   // B[n-1][i] bounds d_{t_i}(x_n, x_hat), n = 1..n_cap
    std::vector<std::size_t> eval;        // nodes used for stopping
    std::vector<double> lambda0;          // lambda_0 at the evaluation nodes
    GridFn w0;                            // Lambda(s, x0, Psi x0) profile
    GridFn d0;                            // d_t(x0, Psi x0)
    bool converged = false;
    bool closed_form = false;             // interval, atomless, monotone lambda
    double p = 1.0;
    std::vector<double> lambda0_all;      // lambda_0 at every node when closed_form
};

struct PicardResult {
    GridFn x_hat;
    std::vector<GridFn> iterates;  // x_0, x_1, ..., x_n
    PicardCertificate cert;
    double residual = 0.0;  // max_t d_t(x_hat, Psi x_hat)
};

/// lambda_0(t) = (int_{I(t)} lambda(t,s)^p mu(ds))^(1/p); Infinity when divergent.
ExtReal lipschitz_profile(const Kernel& lambda, const Domain& domain, const Measure& measure, double p,
                          const Point& t);

enum class Uniqueness { Unique, Unknown };

/// Unique when the series function of lambda converges at every sample.
Uniqueness uniqueness_certificate(const Kernel& lambda, const Domain& domain, const Measure& measure, double p,
                                  const std::vector<Point>& t_samples, double tol = 1e-10);

struct PicardOptions {
    double tol = 1e-6;
    int max_iter = 50;
    std::vector<std::size_t> eval;  // empty means every node
};

/// Picard iteration x_n = Psi(x_{n-1}) with the certified bounds
///   B_n(t) = sum_{i >= n} (int R_{lambda^p,mu,i}(t,s) w0(s)^p mu(ds))^(1/p),
/// w0 taken as a step function (maximum of its two end values on each cell).
/// Stops once max over eval nodes of B_n < tol. Throws NumericalFailure when
/// the lambda series or B_1 diverges at an evaluation node.
PicardResult picard_solve(const EvolutionOperatorSpec& op, const GridFn& x0, const PicardOptions& opt);

struct ErrorBound {
    ExtReal table;                      // B_n(t)
    std::optional<ExtReal> closed_form; // d_t(x0, Psi x0) sum_{i >= n} (1/i!)^(1/p) lambda_0(t)^i
};

/// Bound for iterate n at node i; throws std::out_of_range for n outside 1..n_cap.
ErrorBound error_bound(const PicardCertificate& cert, int n, std::size_t i);

/// Built-in problems for the solve subcommand.
struct CatalogProblem {
    std::string name;
    EvolutionOperatorSpec op;
    GridFn x0;
    GridFn reference;  // exact or directly solved fixed point at the nodes
    std::string reference_kind;
};

/// Psi(u)(t) = 1 + lambda int_0^t u(s) ds on [0, 1]; reference e^(lambda t).
CatalogProblem linear_volterra_problem(double lambda, int level);

/// Psi(u)(t) = 1 + lambda / Gamma(alpha) int_0^t (t-s)^(alpha-1) u(s) ds on [0, 1]
/// by product trapezoidal integration; reference is the discrete fixed point.
CatalogProblem abel_problem(double alpha, double lambda, int level);

/// Psi(x) = lambda0 x + c on the reals (a one-point set with unit mass);
/// reference c / (1 - lambda0).
CatalogProblem banach_problem(double lambda0 = 0.5, double c = 1.0, double x0 = 0.0);

}  // namespace volres
