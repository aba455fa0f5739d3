#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "volres/scalar_fn.hpp"

namespace volres {

using Point = std::vector<double>;

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double x) const { return x >= lo && x <= hi; }
    double length() const { return hi - lo; }
};

/// Ordered integration domain.
///
/// Interval: ordinary order on [lo, hi].
/// Box: componentwise order on a product of intervals. An optional tail axis
///   carries no order (every pair of tail coordinates is related); its points
///   appear as the last coordinate.
/// Void: a set on which every pair of points is related. Points are located
///   either at the atoms of a discrete measure or in an optional support
///   interval for a continuous measure.
class Domain {
public:
    enum class Kind { Interval, Box, Void };

    static Domain interval(double lo, double hi);
    static Domain box(std::vector<Interval> factors, std::optional<Interval> tail = std::nullopt);
    static Domain void_set(std::string label, std::optional<Interval> support = std::nullopt);

    Kind kind() const { return kind_; }
    /// Ordered axes (1 for an interval, m for a box, 0 for a void set).
    std::size_t ordered_dim() const { return axes_.size(); }
    /// Coordinates per point, including the tail axis.
    std::size_t point_dim() const;
    const std::vector<Interval>& axes() const { return axes_; }
    const std::optional<Interval>& tail() const { return tail_; }
    const std::optional<Interval>& support() const { return support_; }
    const std::string& label() const { return label_; }

    bool contains(const Point& t) const;
    /// s <= t in the domain's preorder.
    bool leq(const Point& s, const Point& t) const;

private:
    Kind kind_ = Kind::Interval;
    std::vector<Interval> axes_;
    std::optional<Interval> tail_;
    std::optional<Interval> support_;
    std::string label_;
};

/// One coordinate range per point coordinate; `whole` marks the lower set of
/// a void-ordered domain (the entire set).
struct Region {
    std::vector<Interval> ranges;
    bool whole = false;
};

/// I(t) = { s : s <= t }. Throws ConfigError when t lies outside the domain.
Region lower_set(const Domain& domain, const Point& t);

/// The order interval [s, t] = { r : s <= r <= t }.
Region order_interval(const Domain& domain, const Point& s, const Point& t);

struct Atom {
    double point = 0.0;
    double mass = 0.0;
};

/// Measure on a domain. Product measures list one factor per point coordinate.
class Measure {
public:
    enum class Kind { Lebesgue, Weighted, Discrete, Product };

    static Measure lebesgue();
    static Measure weighted(ScalarFn weight);
    static Measure discrete(std::vector<Atom> atoms);
    static Measure product(std::vector<Measure> factors);

    Kind kind() const { return kind_; }
    const ScalarFn& weight() const { return weight_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Measure>& factors() const { return *factors_; }

    /// Density against Lebesgue measure (1 for Lebesgue, w for Weighted).
    double density(double x) const;

    bool atomless() const { return kind_ == Kind::Lebesgue || kind_ == Kind::Weighted; }

    /// Checks masses/weights are nonnegative and that the measure fits the
    /// domain; throws ConfigError otherwise.
    void validate(const Domain& domain) const;

private:
    Kind kind_ = Kind::Lebesgue;
    ScalarFn weight_;
    std::vector<Atom> atoms_;
    std::shared_ptr<const std::vector<Measure>> factors_;
};

/// Per-axis (domain, measure) view of a box: factor i is the interval
/// measure on axis i; a trailing entry describes the tail axis if present.
struct AxisMeasure {
    Domain domain;
    Measure measure;
};
std::vector<AxisMeasure> split_axes(const Domain& domain, const Measure& measure);

}  // namespace volres
