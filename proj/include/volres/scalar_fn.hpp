#pragma once

#include <functional>
#include <string>

namespace volres {

/// A real function of one variable. The parametric kinds can be written to
/// and read from JSON; Custom wraps an arbitrary callable and is API-only.
///
///   Const   c
///   Power   c * (x - shift)^e        (0 for x <= shift when e > 0)
///   Exp     c * exp(r * x)
///   Linear  a + b * x
class ScalarFn {
public:
    enum class Kind { Const, Power, Exp, Linear, Custom };

    ScalarFn() : name_("const") {}

    static ScalarFn constant(double c);
    static ScalarFn power(double coef, double exponent, double shift = 0.0);
    static ScalarFn exp(double coef, double rate);
    static ScalarFn linear(double a, double b);
    static ScalarFn custom(std::function<double(double)> f, std::string name = "custom");

    double operator()(double x) const;

    Kind kind() const { return kind_; }
    bool serializable() const { return kind_ != Kind::Custom; }
    bool is_constant() const { return kind_ == Kind::Const; }
    const std::string& name() const { return name_; }

    /// Parameters in declaration order (c | coef, exponent, shift | coef, rate | a, b).
    double param(int i) const { return p_[i]; }

    /// Derivative for parametric kinds; throws for Custom.
    ScalarFn derivative() const;

    /// +1 increasing, -1 decreasing, 0 constant on (lo, hi), 2 unknown.
    int monotonicity(double lo, double hi) const;

    /// Whether the function is >= 0 on [lo, hi] (exact for parametric kinds,
    /// sampled for Custom).
    bool nonnegative_on(double lo, double hi) const;

private:
    Kind kind_ = Kind::Const;
    double p_[3] = {0.0, 0.0, 0.0};
    std::function<double(double)> f_;
    std::string name_;
};

}  // namespace volres
