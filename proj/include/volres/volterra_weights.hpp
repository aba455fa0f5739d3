#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "volres/fractional.hpp"
#include "volres/kernels.hpp"
#include "volres/measure.hpp"
#include "volres/specfun.hpp"

namespace volres {

/// Nodes of a domain discretisation.
///
/// Interval axes with an atomless measure use 2^level uniform cells; a
/// discrete measure uses its atoms. An unordered (void or tail) axis uses the
/// atoms of a discrete measure or kTailNodes Gauss-Legendre nodes of its
/// support. Box nodes are the tensor product, last coordinate fastest.
struct QuadratureGrid {
    Domain domain = Domain::interval(0.0, 1.0);
    Measure measure = Measure::lebesgue();
    int level = 0;
    std::string scheme;
    std::vector<std::vector<double>> axis_nodes;
    std::vector<Point> nodes;

    std::size_t size() const { return nodes.size(); }
    std::vector<std::size_t> unflatten(std::size_t k) const;
    std::size_t flatten(const std::vector<std::size_t>& idx) const;
    /// nodes[j] <= nodes[i] in the domain preorder.
    bool related(std::size_t i, std::size_t j) const;
    /// Index of a node equal to x up to 1e-12 relative; nullopt if none.
    std::optional<std::size_t> find(const Point& x) const;
};

constexpr int kTailNodes = 32;

QuadratureGrid make_grid(const Domain& domain, const Measure& measure, int level);

/// Nodes and Nystrom weights of an unordered (void or tail) axis.
void unordered_axis(const Domain& domain, const Measure& measure, std::vector<double>& x, std::vector<double>& w);

/// Engine nodes on [lo, hi]: 2^level uniform cells for an atomless measure,
/// otherwise the atoms in [lo, hi] together with both endpoints.
std::vector<double> interval_nodes(const Measure& measure, double lo, double hi, int level);

/// Linear maps on one axis of a grid that realise
///   f  ->  ( t_i -> int_{[s_j, t_i]} k(t_i, r)^p f(r) mu(dr) )
/// for node values f given on the nodes s_j <= r.
///
/// Ordered continuous axes interpolate f by local Lagrange stencils (degree
/// up to 5) and integrate cell by cell with 6-point Gauss-Legendre rules
/// (graded in end cells where the kernel or density blows up). Discrete axes
/// sum over atoms. Unordered axes use a Nystrom rule over all nodes.
class AxisOperator {
public:
    using KernelPow = std::function<double(double, double)>;  // (t, r) -> k(t, r)^p

    static AxisOperator ordered(KernelPow kp, const Measure& measure, std::vector<double> nodes,
                                bool grade_lo = false);
    static AxisOperator unordered(KernelPow kp, const Measure& measure, std::vector<double> nodes,
                                  std::vector<double> weights);

    /// Ordered operator for a one-dimensional kernel; throws ConfigError for
    /// kernels whose p-th power is singular on the diagonal.
    static AxisOperator for_kernel(const Kernel& kernel, double p, const Measure& measure, std::vector<double> nodes,
                                   bool grade_lo = false);

    std::size_t size() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }
    bool is_ordered() const { return ordered_; }
    bool is_discrete() const { return discrete_; }

    /// Dense size x size matrix (row-major) of the map for lower node j.
    std::vector<double> column_matrix(std::size_t j) const;

    /// int_{I(t_i)} k(t_i, r)^p g(r) mu(dr) for a step function g equal to
    /// step[m+1] on cell m (continuous) or step[l] at atom l (discrete).
    double step_integral(std::size_t i, const std::vector<double>& step) const;

    /// int_{I(t_i)} k(t_i, r)^p f(r) mu(dr) for a function f (evaluated at
    /// the cell quadrature points, or at the atoms).
    double fn_integral(std::size_t i, const std::function<double(double)>& f) const;

private:
    KernelPow kp_;
    std::vector<double> nodes_;
    bool ordered_ = true;
    bool discrete_ = false;
    std::vector<double> mass_;  // atoms (discrete) or Nystrom weights (unordered)
    // continuous ordered: per cell rule and per (row, cell) weighted kernel values
    std::vector<std::vector<double>> cell_x_, cell_w_;
    std::vector<std::vector<std::vector<double>>> kw_;  // kw_[i][m][g]
};

/// Applies a dense n x n matrix along one axis of a tensor array with the
/// given dimensions (last axis fastest).
std::vector<double> apply_along_axis(const std::vector<double>& A, const std::vector<std::size_t>& dims,
                                     std::size_t axis, const std::vector<double>& in);

/// How iterates of a kernel are computed.
enum class Regime {
    Tensor,          // axis operators (interval, box with product kernel, void Nystrom)
    Family,          // fractional family recursion (Lebesgue interval)
    VoidClosed,      // separable kernel on a void set, closed form
    Multiplicative,  // exp(nu([s, t])) on an atomless interval measure, closed form
};

Regime classify(const Kernel& kernel, const Domain& domain, const Measure& measure, double p);

/// Iterated kernels of a fractional, transformed fractional or (p = 1) sum of
/// fractional kernels with a common t0, through the homogeneous family
/// recursion, together with the termwise majorant
///   c_hat_n (N Gamma(a0) w)^n / Gamma((a0 - b_inf) n + b_inf) k_n(x) l(y).
class FamilyIterates {
public:
    FamilyIterates(const Kernel& kernel, double p, int rule_layers = 20);

    double value(int n, double t, double s);
    /// log of the majorant of R_n(t, s).
    double log_bound(int n, double t, double s) const;
    /// log of a bound of int_{[lo, t]} R_n(t, s) g(s) ds given
    /// log_u = log int_{[lo, t]} l(s) g(s) ds; valid once exponent_ok(n).
    double log_integral_bound(int n, double t, double log_u) const;
    bool exponent_ok(int n) const;
    /// l(s) (including phi'(s) for transformed kernels).
    double weight_l(double s) const;
    /// int_{t0}^{t} R_n(t, s) ds.
    double lower_set_integral(int n, double t);
    double t0() const { return t0_; }
    FractionalFamily& family() { return fam_; }

private:
    double log_chat(int n) const;
    double log_k(int n, double x) const;

    Kernel kernel_;
    bool transformed_ = false;
    double t0_ = 0.0;
    double a0_ = 1.0, ainf_ = 1.0, b0_ = 0.0, binf_ = 0.0, log_scale_ = 0.0;
    FractionalFamily fam_;
};

/// Engine options shared by the pointwise and lower-set series.
struct EngineOptions {
    int level = 7;           // interval sub-grid level for pointwise/lower-set work
    int box_level = 4;       // per-axis level on boxes
    int max_terms = 400;
};

/// R_{k^p,mu,n}(t, s) for n = 1..n_max together with a certified bound on
/// sum_{n > n_max} (when tail_known). Terms stop early once they and the
/// tail are negligible relative to tol.
struct PointwiseIterates {
    std::vector<double> terms;
    double tail = 0.0;
    bool tail_known = false;
    bool divergent = false;
};

PointwiseIterates pointwise_iterates(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                                     const Point& t, const Point& s, int n_max, double tol,
                                     const EngineOptions& opt = {});

/// Weight v(s)^p for lower-set integrals: either a function of the point or
/// a step function on the nodes of the grid spanned by lower_set_grid.
struct Weight {
    std::function<double(const Point&)> fn;  // empty means v = 1
    bool unit() const { return !fn; }
};

/// J_n(t) = int_{I(t)} R_{k^p,mu,n}(t, s) v(s)^p mu(ds) for n = 1, 2, ...
/// and the series sum_n J_n(t)^(1/p) with a family-dispatched tail bound.
struct LowerSetSeries {
    std::vector<double> J;
    SeriesValue series;
};

LowerSetSeries lower_set_series(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                                const Point& t, const Weight& weight, double tol, int n_max = -1,
                                const EngineOptions& opt = {});

/// Same recursion on the nodes of an existing interval grid with a step
/// weight (value step[m+1] on cell m); returns J_n at every node for
/// n = 1..n_max plus the closing tail bound of sum_{i > n_max} J_i^(1/p)
/// at every node (infinite when no majorant is known).
struct GridSeries {
    std::vector<std::vector<double>> J;  // J[n-1][i]
    std::vector<double> tail;            // bound of sum_{i > n_max} J_i^(1/p)
};

GridSeries grid_step_series(const Kernel& kernel, const QuadratureGrid& grid, double p, const std::vector<double>& step,
                            int n_max);

/// Cumulative integrals int_{lo}^{x_i} f(r) mu(dr) of node values on an interval grid.
std::vector<double> cumulative_integral(const QuadratureGrid& grid, const std::vector<double>& f);

}  // namespace volres
