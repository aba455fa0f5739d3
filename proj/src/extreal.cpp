#include "volres/extreal.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace volres {

ExtReal::ExtReal(double v) {
    if (std::isnan(v)) throw std::domain_error("ExtReal: NaN is not an extended nonnegative real");
    if (v < 0.0) throw std::domain_error("ExtReal: negative value " + std::to_string(v));
    if (std::isinf(v)) {
        inf_ = true;
    } else {
        v_ = v + 0.0;  // normalises -0.0
    }
}

double ExtReal::finite_value() const {
    if (inf_) throw std::domain_error("ExtReal: value is infinite");
    return v_;
}

ExtReal& ExtReal::operator+=(const ExtReal& o) {
    if (inf_ || o.inf_) {
        *this = infinity();
        return *this;
    }
    const double s = v_ + o.v_;
    if (std::isinf(s)) *this = infinity();
    else v_ = s;
    return *this;
}

ExtReal& ExtReal::operator*=(const ExtReal& o) {
    const bool this_zero = !inf_ && v_ == 0.0;
    const bool o_zero = !o.inf_ && o.v_ == 0.0;
    if (this_zero || o_zero) {
        *this = ExtReal();
        return *this;
    }
    if (inf_ || o.inf_) {
        *this = infinity();
        return *this;
    }
    const double p = v_ * o.v_;
    if (std::isinf(p)) *this = infinity();
    else v_ = p;
    return *this;
}

ExtReal pow(const ExtReal& x, double e) {
    if (!(e > 0.0)) throw std::domain_error("ExtReal pow: exponent must be positive");
    if (x.is_infinite()) return ExtReal::infinity();
    return ExtReal(std::pow(x.value(), e));
}

ExtReal root(const ExtReal& x, double p) {
    if (!(p >= 1.0)) throw std::domain_error("ExtReal root: p must be >= 1");
    if (p == 1.0) return x;
    return pow(x, 1.0 / p);
}

ExtReal to_ext(double v, double tiny) {
    if (v < 0.0 && v >= -tiny) return ExtReal();
    return ExtReal(v);
}

std::ostream& operator<<(std::ostream& os, const ExtReal& x) {
    if (x.is_infinite()) return os << "inf";
    return os << x.value();
}

}  // namespace volres
