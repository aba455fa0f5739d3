#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "volres/extreal.hpp"
#include "volres/fractional.hpp"
#include "volres/kernels.hpp"
#include "volres/measure.hpp"
#include "volres/specfun.hpp"
#include "volres/volterra_weights.hpp"

namespace volres {

enum class TableStatus { Ok, UnknownAccuracy };

/// Layers R_{k^p,mu,n}(t_i, s_j), n = 1..n_max, on the related pairs
/// s_j <= t_i of a grid. Unrelated pairs are masked and cannot be read.
class ResolventTable {
public:
    ResolventTable(QuadratureGrid grid, int n_max, double p);

    const QuadratureGrid& grid() const { return grid_; }
    int n_max() const { return n_max_; }
    double p() const { return p_; }
    double err_est() const { return err_est_; }
    TableStatus status() const { return status_; }

    bool defined(std::size_t i, std::size_t j) const { return mask_[i * grid_.size() + j]; }
    /// Throws std::out_of_range for masked entries or indices out of range.
    double value(int n, std::size_t i, std::size_t j) const;

    void write_csv(std::ostream& os) const;
    std::string to_json() const;

    // construction
    void set(int n, std::size_t i, std::size_t j, double v);
    void set_err_est(double e);

private:
    QuadratureGrid grid_;
    int n_max_;
    double p_;
    double err_est_ = 0.0;
    TableStatus status_ = TableStatus::Ok;
    std::vector<char> mask_;
    std::vector<std::vector<double>> values_;
};

/// Iterated kernels on the grid nodes. The n = 1 layer is k^p exactly;
/// err_est is the largest difference to the same layers on the grid one
/// level coarser (common nodes).
ResolventTable iterated_kernels(const Kernel& kernel, const Measure& measure, double p, int n_max,
                                const QuadratureGrid& grid);

/// R_{k^p,mu}(t, s) = sum_n R_{k^p,mu,n}(t, s) with a family-dispatched tail bound.
SeriesValue resolvent_series(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                             const Point& t, const Point& s, double tol, const EngineOptions& opt = {});

/// |R(t,s) - k(t,s) - int_{[s,t]} k(t,r) R(r,s) mu(dr)| for p = 1, where R is the
/// resolvent summed on a level-`level` engine grid (truncated after n_max
/// terms when n_max > 0) and the integral is an independent adaptive quadrature.
double volterra_residual(const Kernel& kernel, const Domain& domain, const Measure& measure, const Point& t,
                         const Point& s, int level = 6, int n_max = -1);

/// I_{k,mu,p}(t) = sum_n (int_{I(t)} R_{k^p,mu,n}(t, s) mu(ds))^(1/p).
SeriesValue series_function_I(const Kernel& kernel, const Domain& domain, const Measure& measure, double p,
                              const Point& t, double tol, const EngineOptions& opt = {});

/// Components R_{k,mu,n,j}(t, s), j in {1..N}^n (1-based digits, j_1 innermost),
/// of a sum of kernels on an interval. Refuses (ConfigError) when N^n exceeds budget.
std::map<std::vector<int>, double> sum_decomposition(const std::vector<Kernel>& parts, const Domain& domain,
                                                     const Measure& measure, int n, double t, double s,
                                                     int level = 7, std::size_t budget = 4096);

/// One axis of a product kernel.
struct AxisFactor {
    Kernel kernel;
    Domain domain;
    Measure measure;
};

/// prod_i R_{k_i^p,mu_i,n}(t_i, s_i).
ExtReal product_bound(const std::vector<AxisFactor>& factors, double p, int n, const Point& t, const Point& s);

/// prod_i I_{k_i,mu_i,p}(t_i) (upper bound of the box series function).
ExtReal product_series_bound(const std::vector<AxisFactor>& factors, double p, const Point& t, double tol);

/// Constant c_{alpha,beta,p} = prod_i c_hat_{p,i}^(1/p) of the multivariate
/// fractional resolvent estimate (valid, possibly non-optimal; 1 at beta = 0).
double fractional_lp_constant(const std::vector<double>& alpha, const std::vector<double>& beta, double p);

}  // namespace volres
