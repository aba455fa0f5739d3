#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "volres/extreal.hpp"
#include "volres/measure.hpp"
#include "volres/scalar_fn.hpp"

namespace volres {

/// Declared monotonicity of the t-factor of a separable kernel.
enum class Monotone { Auto, Increasing, Decreasing, Constant, None };

struct AlphaBetaBounds {
    double alpha0 = 0.0;
    double alpha_inf = 0.0;
    double beta0 = 0.0;
    double beta_inf = 0.0;
};

/// Nonnegative kernel k(t, s) on the triangle s <= t.
///
///   Separable               k0(t) k1(s)
///   Fractional              coef (t-s)^(alpha-1) (s-t0)^(-beta)
///   TransformedFractional   sum_j phi'(s) (phi(t)-phi(s))^(alpha_j-1) (phi(s)-phi(t0))^(-beta_j)
///   Sum                     sum of parts
///   Product                 prod_i k_i(t_i, s_i) * tail(s_tail) on a box
///   Void                    k1(s), for void-ordered domains
///   Multiplicative          exp(nu([s, t])) with nu(ds) = density(s) ds
class Kernel {
public:
    enum class Family { Separable, Fractional, TransformedFractional, Sum, Product, Void, Multiplicative };

    static Kernel separable(ScalarFn k0, ScalarFn k1, Monotone k0_monotone = Monotone::Auto);
    static Kernel constant(double c);
    static Kernel fractional(double alpha, double beta, double t0, double coef = 1.0);
    static Kernel transformed_fractional(ScalarFn phi, ScalarFn phi_dot, std::vector<double> alpha,
                                         std::vector<double> beta, double t0);
    static Kernel sum(std::vector<Kernel> parts);
    static Kernel product(std::vector<Kernel> factors, std::optional<ScalarFn> tail_factor = std::nullopt);
    static Kernel void_kernel(ScalarFn k1);
    static Kernel multiplicative(ScalarFn nu_density);

    Family family() const { return family_; }

    /// Scalar evaluation for one-dimensional (interval or void) kernels. Returns
    /// +inf at singular points and never NaN (0 * inf = 0).
    double eval1(double t, double s) const;

    /// Evaluation at points of `domain`; throws std::domain_error unless s <= t.
    ExtReal eval(const Domain& domain, const Point& t, const Point& s) const;

    /// Raw evaluation without the order check (points of an interval, box or
    /// void set). Never NaN.
    double eval_point(const Point& t, const Point& s) const;

    /// Whether k(s~, s) <= k(t, s) for s <= s~ <= t follows from the family
    /// structure on the given domain.
    bool monotone_declared(const Domain& domain) const;

    /// Checks family invariants for exponent p; throws ConfigError.
    void validate(double p) const;

    /// Checks that the kernel shape fits the domain; throws ConfigError.
    void validate_domain(const Domain& domain) const;

    // Family data.
    const ScalarFn& k0() const { return f0_; }
    const ScalarFn& k1() const { return f1_; }
    Monotone k0_monotone() const { return mono_; }
    double alpha() const { return alpha_.at(0); }
    double beta() const { return beta_.at(0); }
    const std::vector<double>& alphas() const { return alpha_; }
    const std::vector<double>& betas() const { return beta_; }
    double t0() const { return t0_; }
    double coef() const { return coef_; }
    const ScalarFn& phi() const { return f0_; }
    const ScalarFn& phi_dot() const { return f1_; }
    const ScalarFn& nu_density() const { return f0_; }
    const std::vector<Kernel>& parts() const { return *children_; }
    const std::optional<ScalarFn>& tail_factor() const { return tail_; }

    /// nu([s, t]) for a multiplicative kernel.
    double nu_mass(double s, double t) const;

    /// Componentwise alpha/beta extremes of a transformed fractional kernel.
    AlphaBetaBounds alpha_beta_bounds() const;

    /// True for constant separable kernels (k0 and k1 constant); sets c.
    bool is_constant(double* c = nullptr) const;

    /// Whether k(t, s) can be infinite as s -> t (diagonal singularity) for k^p.
    bool diagonal_singular(double p) const;

private:
    Family family_ = Family::Separable;
    ScalarFn f0_, f1_;
    Monotone mono_ = Monotone::Auto;
    std::vector<double> alpha_, beta_;
    double t0_ = 0.0;
    double coef_ = 1.0;
    std::shared_ptr<const std::vector<Kernel>> children_;
    std::optional<ScalarFn> tail_;
};

struct MonotoneReport {
    bool pass = true;
    int samples = 0;
    // witness triple s <= s~ <= t with k(s~, s) > k(t, s) when pass is false
    Point s, s_mid, t;
    double k_mid = 0.0;
    double k_top = 0.0;
};

/// Randomized falsification of k(s~, s) <= k(t, s) on ordered triples.
MonotoneReport check_monotone(const Kernel& kernel, const Domain& domain, int samples, std::uint64_t seed = 42,
                              const Measure* measure = nullptr);

struct Triple {
    Point s, s_mid, t;
};

/// max over triples of k(t, s~) k(s~, s) - k(t, s); 0 when all three are infinite.
double submultiplicative_defect(const Kernel& kernel, const Domain& domain, const std::vector<Triple>& triples);

/// Random ordered triples s <= s~ <= t in a domain.
std::vector<Triple> sample_triples(const Domain& domain, int count, std::uint64_t seed = 42,
                                   const Measure* measure = nullptr);

/// a * b with 0 * inf = 0.
inline double xmul(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

}  // namespace volres
