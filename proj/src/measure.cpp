#include "volres/measure.hpp"

#include <cmath>
#include <sstream>

#include "volres/errors.hpp"

namespace volres {

namespace {

void check_interval(const Interval& iv, const char* what) {
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi)) || !(iv.lo < iv.hi)) {
        std::ostringstream os;
        os << what << ": interval [" << iv.lo << ", " << iv.hi << "] is degenerate or not finite";
        throw ConfigError(os.str());
    }
}

}  // namespace

Domain Domain::interval(double lo, double hi) {
    Domain d;
    d.kind_ = Kind::Interval;
    d.axes_ = {Interval{lo, hi}};
    check_interval(d.axes_[0], "interval domain");
    return d;
}

Domain Domain::box(std::vector<Interval> factors, std::optional<Interval> tail) {
    if (factors.empty()) throw ConfigError("box domain needs at least one factor");
    for (const auto& f : factors) check_interval(f, "box domain factor");
    if (tail) check_interval(*tail, "box domain tail");
    Domain d;
    d.kind_ = Kind::Box;
    d.axes_ = std::move(factors);
    d.tail_ = tail;
    return d;
}

Domain Domain::void_set(std::string label, std::optional<Interval> support) {
    if (support) check_interval(*support, "void domain support");
    Domain d;
    d.kind_ = Kind::Void;
    d.label_ = std::move(label);
    d.support_ = support;
    return d;
}

std::size_t Domain::point_dim() const {
    switch (kind_) {
        case Kind::Interval:
            return 1;
        case Kind::Box:
            return axes_.size() + (tail_ ? 1 : 0);
        case Kind::Void:
            return 1;
    }
    return 1;
}

bool Domain::contains(const Point& t) const {
    if (t.size() != point_dim()) return false;
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (!axes_[i].contains(t[i])) return false;
    if (kind_ == Kind::Box && tail_ && !tail_->contains(t.back())) return false;
    if (kind_ == Kind::Void && support_ && !support_->contains(t[0])) return false;
    return true;
}

bool Domain::leq(const Point& s, const Point& t) const {
    if (kind_ == Kind::Void) return true;
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (!(s[i] <= t[i])) return false;
    return true;
}

Region lower_set(const Domain& domain, const Point& t) {
    if (!domain.contains(t)) throw ConfigError("lower_set: point outside the domain");
    Region r;
    if (domain.kind() == Domain::Kind::Void) {
        r.whole = true;
        if (domain.support()) r.ranges = {*domain.support()};
        return r;
    }
    for (std::size_t i = 0; i < domain.ordered_dim(); ++i)
        r.ranges.push_back(Interval{domain.axes()[i].lo, t[i]});
    if (domain.tail()) r.ranges.push_back(*domain.tail());
    return r;
}

Region order_interval(const Domain& domain, const Point& s, const Point& t) {
    if (!domain.contains(t) || !domain.contains(s)) throw ConfigError("order_interval: point outside the domain");
    if (!domain.leq(s, t)) throw ConfigError("order_interval: s is not <= t");
    Region r;
    if (domain.kind() == Domain::Kind::Void) {
        r.whole = true;
        if (domain.support()) r.ranges = {*domain.support()};
        return r;
    }
    for (std::size_t i = 0; i < domain.ordered_dim(); ++i) r.ranges.push_back(Interval{s[i], t[i]});
    if (domain.tail()) r.ranges.push_back(*domain.tail());
    return r;
}

Measure Measure::lebesgue() { return Measure(); }

Measure Measure::weighted(ScalarFn weight) {
    Measure m;
    m.kind_ = Kind::Weighted;
    m.weight_ = std::move(weight);
    return m;
}

Measure Measure::discrete(std::vector<Atom> atoms) {
    if (atoms.empty()) throw ConfigError("discrete measure needs at least one atom");
    for (const auto& a : atoms) {
        if (!(a.mass >= 0.0) || !std::isfinite(a.mass)) throw ConfigError("discrete measure: atom masses must be finite and >= 0");
        if (!std::isfinite(a.point)) throw ConfigError("discrete measure: atom location must be finite");
    }
    for (std::size_t i = 1; i < atoms.size(); ++i)
        if (!(atoms[i - 1].point < atoms[i].point)) throw ConfigError("discrete measure: atom locations must be strictly increasing");
    Measure m;
    m.kind_ = Kind::Discrete;
    m.atoms_ = std::move(atoms);
    return m;
}

Measure Measure::product(std::vector<Measure> factors) {
    if (factors.empty()) throw ConfigError("product measure needs at least one factor");
    for (const auto& f : factors)
        if (f.kind() == Kind::Product) throw ConfigError("product measure factors must be one-dimensional");
    Measure m;
    m.kind_ = Kind::Product;
    m.factors_ = std::make_shared<const std::vector<Measure>>(std::move(factors));
    return m;
}

double Measure::density(double x) const {
    if (kind_ == Kind::Weighted) return weight_(x);
    return 1.0;
}

void Measure::validate(const Domain& domain) const {
    switch (domain.kind()) {
        case Domain::Kind::Interval: {
            const Interval iv = domain.axes()[0];
            if (kind_ == Kind::Product) throw ConfigError("interval domain cannot carry a product measure");
            if (kind_ == Kind::Weighted && !weight_.nonnegative_on(iv.lo, iv.hi))
                throw ConfigError("weighted measure: weight must be nonnegative on the domain");
            if (kind_ == Kind::Discrete)
                for (const auto& a : atoms_)
                    if (!iv.contains(a.point)) throw ConfigError("discrete measure: atom outside the interval");
            return;
        }
        case Domain::Kind::Box: {
            const std::size_t need = domain.point_dim();
            if (kind_ == Kind::Lebesgue && !domain.tail()) return;
            if (kind_ != Kind::Product || factors().size() != need)
                throw ConfigError("box domain needs a product measure with one factor per coordinate");
            for (const auto& ax : split_axes(domain, *this)) ax.measure.validate(ax.domain);
            return;
        }
        case Domain::Kind::Void: {
            if (kind_ == Kind::Product) throw ConfigError("void domain cannot carry a product measure");
            if (kind_ != Kind::Discrete && !domain.support())
                throw ConfigError("void domain with a continuous measure needs a support interval");
            if (kind_ == Kind::Weighted && !weight_.nonnegative_on(domain.support()->lo, domain.support()->hi))
                throw ConfigError("weighted measure: weight must be nonnegative on the support");
            if (kind_ == Kind::Discrete && domain.support())
                for (const auto& a : atoms_)
                    if (!domain.support()->contains(a.point)) throw ConfigError("discrete measure: atom outside the support");
            return;
        }
    }
}

std::vector<AxisMeasure> split_axes(const Domain& domain, const Measure& measure) {
    std::vector<AxisMeasure> out;
    if (domain.kind() != Domain::Kind::Box) {
        out.push_back({domain, measure});
        return out;
    }
    const std::size_t m = domain.ordered_dim();
    for (std::size_t i = 0; i < m; ++i) {
        const Interval iv = domain.axes()[i];
        Measure mi = measure.kind() == Measure::Kind::Product ? measure.factors().at(i) : Measure::lebesgue();
        out.push_back({Domain::interval(iv.lo, iv.hi), mi});
    }
    if (domain.tail()) {
        Measure mt = measure.kind() == Measure::Kind::Product ? measure.factors().at(m) : Measure::lebesgue();
        out.push_back({Domain::void_set("tail", *domain.tail()), mt});
    }
    return out;
}

}  // namespace volres
