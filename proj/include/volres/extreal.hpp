#pragma once

#include <compare>
#include <iosfwd>
#include <limits>

namespace volres {

/// Nonnegative extended real number: a finite value >= 0 or +infinity.
///
/// Arithmetic saturates at infinity and follows the measure-theoretic
/// convention 0 * inf = 0. NaN and negative values are rejected at
/// construction, so no operation on ExtReal can produce either.
class ExtReal {
public:
    constexpr ExtReal() = default;

    /// Throws std::domain_error for NaN or negative input. -0.0 maps to 0,
    /// +inf maps to infinity.
    explicit ExtReal(double v);

    static constexpr ExtReal infinity() { return ExtReal(Tag{}); }
    static constexpr ExtReal zero() { return ExtReal(); }

    constexpr bool is_infinite() const { return inf_; }
    constexpr bool is_finite() const { return !inf_; }

    /// The value as a double; +inf when infinite.
    constexpr double value() const {
        return inf_ ? std::numeric_limits<double>::infinity() : v_;
    }

    /// Throws std::domain_error when infinite.
    double finite_value() const;

    ExtReal& operator+=(const ExtReal& o);
    ExtReal& operator*=(const ExtReal& o);

    friend ExtReal operator+(ExtReal a, const ExtReal& b) { return a += b; }
    friend ExtReal operator*(ExtReal a, const ExtReal& b) { return a *= b; }

    friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }
    friend constexpr std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
        if (a.inf_ || b.inf_) return a.inf_ == b.inf_ ? std::partial_ordering::equivalent
                                     : (a.inf_ ? std::partial_ordering::greater
                                               : std::partial_ordering::less);
        return a.v_ <=> b.v_;
    }

private:
    struct Tag {};
    constexpr explicit ExtReal(Tag) : inf_(true) {}

    double v_ = 0.0;
    bool inf_ = false;
};

/// x^e for e > 0; inf^e = inf, 0^e = 0.
ExtReal pow(const ExtReal& x, double e);

/// x^(1/p) for p >= 1.
ExtReal root(const ExtReal& x, double p);

/// Saturating conversion from a double that may be +inf. Negative values
/// within -tiny of zero (quadrature round-off) clamp to 0; anything else
/// negative or NaN throws.
ExtReal to_ext(double v, double tiny = 0.0);

std::ostream& operator<<(std::ostream& os, const ExtReal& x);

}  // namespace volres
