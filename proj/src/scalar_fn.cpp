#include "volres/scalar_fn.hpp"

#include <cmath>
#include <limits>

#include "volres/errors.hpp"

namespace volres {

ScalarFn ScalarFn::constant(double c) {
    ScalarFn f;
    f.kind_ = Kind::Const;
    f.p_[0] = c;
    f.name_ = "const";
    return f;
}

ScalarFn ScalarFn::power(double coef, double exponent, double shift) {
    ScalarFn f;
    f.kind_ = Kind::Power;
    f.p_[0] = coef;
    f.p_[1] = exponent;
    f.p_[2] = shift;
    f.name_ = "power";
    return f;
}

ScalarFn ScalarFn::exp(double coef, double rate) {
    ScalarFn f;
    f.kind_ = Kind::Exp;
    f.p_[0] = coef;
    f.p_[1] = rate;
    f.name_ = "exp";
    return f;
}

ScalarFn ScalarFn::linear(double a, double b) {
    ScalarFn f;
    f.kind_ = Kind::Linear;
    f.p_[0] = a;
    f.p_[1] = b;
    f.name_ = "linear";
    return f;
}

ScalarFn ScalarFn::custom(std::function<double(double)> fn, std::string name) {
    if (!fn) throw ConfigError("ScalarFn::custom: empty callable");
    ScalarFn f;
    f.kind_ = Kind::Custom;
    f.f_ = std::move(fn);
    f.name_ = std::move(name);
    return f;
}

double ScalarFn::operator()(double x) const {
    switch (kind_) {
        case Kind::Const:
            return p_[0];
        case Kind::Power: {
            const double d = x - p_[2];
            if (p_[1] == 0.0) return p_[0];
            if (d <= 0.0) {
                if (p_[1] > 0.0) return 0.0;
                return p_[0] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            }
            return p_[0] * std::pow(d, p_[1]);
        }
        case Kind::Exp:
            return p_[0] * std::exp(p_[1] * x);
        case Kind::Linear:
            return p_[0] + p_[1] * x;
        case Kind::Custom:
            return f_(x);
    }
    return 0.0;
}

ScalarFn ScalarFn::derivative() const {
    switch (kind_) {
        case Kind::Const:
            return constant(0.0);
        case Kind::Power:
            if (p_[1] == 0.0) return constant(0.0);
            return power(p_[0] * p_[1], p_[1] - 1.0, p_[2]);
        case Kind::Exp:
            return exp(p_[0] * p_[1], p_[1]);
        case Kind::Linear:
            return constant(p_[1]);
        case Kind::Custom:
            break;
    }
    throw ConfigError("ScalarFn: derivative of a custom function is not available");
}

int ScalarFn::monotonicity(double lo, double hi) const {
    switch (kind_) {
        case Kind::Const:
            return 0;
        case Kind::Power:
            if (p_[0] == 0.0 || p_[1] == 0.0) return 0;
            if (p_[1] > 0.0) return p_[0] > 0.0 ? 1 : -1;
            if (lo < p_[2]) return 2;
            return p_[0] > 0.0 ? -1 : 1;
        case Kind::Exp:
            if (p_[0] == 0.0 || p_[1] == 0.0) return 0;
            return (p_[0] > 0.0) == (p_[1] > 0.0) ? 1 : -1;
        case Kind::Linear:
            if (p_[1] == 0.0) return 0;
            return p_[1] > 0.0 ? 1 : -1;
        case Kind::Custom: {
            constexpr int n = 64;
            bool inc = true, dec = true;
            double prev = f_(lo);
            for (int i = 1; i <= n; ++i) {
                const double x = lo + (hi - lo) * i / n;
                const double v = f_(x);
                if (v < prev) inc = false;
                if (v > prev) dec = false;
                prev = v;
            }
            if (inc && dec) return 0;
            if (inc) return 1;
            if (dec) return -1;
            return 2;
        }
    }
    return 2;
}

bool ScalarFn::nonnegative_on(double lo, double hi) const {
    switch (kind_) {
        case Kind::Const:
        case Kind::Power:
        case Kind::Exp:
            return p_[0] >= 0.0;
        case Kind::Linear:
            return p_[0] + p_[1] * lo >= 0.0 && p_[0] + p_[1] * hi >= 0.0;
        case Kind::Custom: {
            constexpr int n = 64;
            for (int i = 0; i <= n; ++i) {
                const double v = f_(lo + (hi - lo) * i / n);
                if (!(v >= 0.0)) return false;
            }
            return true;
        }
    }
    return false;
}

}  // namespace volres
