#pragma once

#include <cstddef>
#include <vector>

namespace volres {

/// Parameters of the p-th power of the fractional kernel
/// (t-s)^(alpha-1) (s-t0)^(-beta).
struct FractionalResolventParams {
    double alpha = 1.0;
    double beta = 0.0;
    double p = 1.0;

    double alpha_p() const { return (alpha - 1.0) * p + 1.0; }
    double beta_p() const { return beta * p; }

    /// Throws ConfigError unless alpha > 0, beta >= 0, p >= 1 and
    /// beta p < alpha_p.
    void validate() const;

    /// prod_{i=1}^{n-1} Gamma((a-b) i) / Gamma((a-b) i + b), a = alpha_p, b = beta p.
    double c_hat(int n) const;
    /// min { i : (a-b) i >= x_Gamma }.
    int n_gamma() const;
    /// max_{i <= n_gamma} c_hat(i), which bounds c_hat(n) for every n.
    double c_hat_max() const;
};

/// The families f_{n,j} of functions on (0,inf)^2 generated from exponent
/// pairs (alpha_j, beta_j), j = 1..N, by
///   f_{1,j}(x,y)   = x^(alpha_j - 1) y^(-beta_j)
///   f_{n+1,j}(x,y) = x^(alpha_{j_{n+1}}) int_0^1 (1-l)^(alpha_{j_{n+1}}-1)
///                      (l x + y)^(-beta_{j_{n+1}}) f_{n,(j_1..j_n)}(l x, y) dl.
///
/// Each f_{n,j} is homogeneous, so it is stored through a function of
/// w = log(1 + x/y) on Chebyshev panels; components whose betas vanish use
/// the closed form prod Gamma(alpha_{j_i}) / Gamma(sum alpha_{j_i}) x^(sum alpha - 1).
///
/// Levels are built lazily; an object is not safe for concurrent use.
class FractionalFamily {
public:
    /// log_weight[j] (default 0) multiplies every component by
    /// exp(sum_i log_weight[j_i]); rule_layers sets the lambda-quadrature size.
    FractionalFamily(std::vector<double> alpha, std::vector<double> beta, std::vector<double> log_weight = {},
                     std::size_t budget = 4096, int rule_layers = 20);

    /// Scalar family f_{p,n} for the p-th power of a fractional kernel.
    static FractionalFamily for_power(const FractionalResolventParams& params);

    std::size_t parts() const { return alpha_.size(); }

    /// f_{n,j}(x, y) for a multi-index given in base N (component index in [0, N^n)).
    double component(int n, std::size_t index, double x, double y);

    /// sum_j f_{n,j}(x, y).
    double total(int n, double x, double y);

    /// Multi-index digits (1-based) of a component index.
    std::vector<int> multi_index(int n, std::size_t index) const;

    /// int_0^T sum_j f_{n,j}(T - s, s) ds.
    double lower_set_integral(int n, double T);

    /// Number of components at level n; throws NumericalFailure beyond the budget.
    std::size_t components(int n) const;

    bool all_beta_zero() const { return beta_zero_; }

private:
    struct Node {
        double A = 0.0;      // sum of alphas
        double D = 0.0;      // homogeneity degree
        double E = 0.0;      // sum of betas minus the first one
        double beta1 = 0.0;  // beta of the first index
        double log_c = 0.0;  // log of prod Gamma(alpha) / Gamma(A)
        bool trivial = true;
        std::vector<double> g;  // normalised profile on the panel nodes
    };

    void ensure_level(int n);
    Node extend(const Node& prev, std::size_t j) const;
    double profile(const Node& node, double w) const;
    double eval_node(const Node& node, double x, double y) const;
    double node_integral(const Node& node) const;

    std::vector<double> alpha_, beta_, logw_;
    std::size_t budget_;
    int layers_;
    bool beta_zero_ = true;
    std::vector<std::vector<Node>> levels_;
    std::vector<double> wnodes_;
};

/// f_{p,n}(x, y): exact closed form when beta = 0, recursion otherwise.
double fractional_f(const FractionalResolventParams& params, int n, double x, double y);

/// c_hat_{p,n} Gamma(a)^n / Gamma((a-b) n + b) x^((a-b) n + b - 1) y^(-b).
double fractional_f_bound(const FractionalResolventParams& params, int n, double x, double y);

/// Natural log of fractional_f_bound (finite for x, y > 0).
double log_fractional_f_bound(const FractionalResolventParams& params, int n, double x, double y);

}  // namespace volres
