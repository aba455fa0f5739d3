#include "volres/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "volres/errors.hpp"

namespace volres {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double num_field(const json& j, const char* key, const std::string& path) {
    return num(field(j, key, path), path + "." + key);
}

double num_or(const json& j, const char* key, double dflt, const std::string& path) {
    auto it = j.find(key);
    return it == j.end() ? dflt : num(*it, path + "." + key);
}

std::string str_field(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

Interval interval_of(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
    return Interval{num(j[0], path + "[0]"), num(j[1], path + "[1]")};
}

json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

std::vector<double> num_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

const char* monotone_name(Monotone m) {
    switch (m) {
        case Monotone::Auto: return "auto";
        case Monotone::Increasing: return "increasing";
        case Monotone::Decreasing: return "decreasing";
        case Monotone::Constant: return "constant";
        case Monotone::None: return "none";
    }
    return "auto";
}

Monotone monotone_of(const std::string& s, const std::string& path) {
    if (s == "auto") return Monotone::Auto;
    if (s == "increasing") return Monotone::Increasing;
    if (s == "decreasing") return Monotone::Decreasing;
    if (s == "constant") return Monotone::Constant;
    if (s == "none") return Monotone::None;
    fail(path, "unknown monotonicity '" + s + "'");
}

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError& e) {
        const std::string w = e.what();
        if (w.rfind("config: ", 0) == 0) throw;
        fail(path, w);
    }
}

}  // namespace

ScalarFn fn_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return ScalarFn::constant(j.get<double>());
    const std::string kind = str_field(j, "kind", path);
    return wrap(path, [&] {
        if (kind == "const") return ScalarFn::constant(num_field(j, "c", path));
        if (kind == "power")
            return ScalarFn::power(num_or(j, "coef", 1.0, path), num_field(j, "exponent", path),
                                   num_or(j, "shift", 0.0, path));
        if (kind == "exp") return ScalarFn::exp(num_or(j, "coef", 1.0, path), num_field(j, "rate", path));
        if (kind == "linear") return ScalarFn::linear(num_field(j, "a", path), num_field(j, "b", path));
        fail(path, "unknown function kind '" + kind + "'");
    });
}

json fn_to_json(const ScalarFn& f) {
    switch (f.kind()) {
        case ScalarFn::Kind::Const: return json{{"kind", "const"}, {"c", f.param(0)}};
        case ScalarFn::Kind::Power:
            return json{{"kind", "power"}, {"coef", f.param(0)}, {"exponent", f.param(1)}, {"shift", f.param(2)}};
        case ScalarFn::Kind::Exp: return json{{"kind", "exp"}, {"coef", f.param(0)}, {"rate", f.param(1)}};
        case ScalarFn::Kind::Linear: return json{{"kind", "linear"}, {"a", f.param(0)}, {"b", f.param(1)}};
        case ScalarFn::Kind::Custom: break;
    }
    throw ConfigError("config: function '" + f.name() + "' cannot be serialised");
}

Domain domain_from_json(const json& j, const std::string& path) {
    const std::string kind = str_field(j, "kind", path);
    return wrap(path, [&] {
        if (kind == "interval") return Domain::interval(num_field(j, "lo", path), num_field(j, "hi", path));
        if (kind == "box") {
            const json& axes = field(j, "axes", path);
            if (!axes.is_array() || axes.empty()) fail(path + ".axes", "expected a nonempty array");
            std::vector<Interval> iv;
            for (std::size_t i = 0; i < axes.size(); ++i)
                iv.push_back(interval_of(axes[i], path + ".axes[" + std::to_string(i) + "]"));
            std::optional<Interval> tail;
            if (j.contains("tail")) tail = interval_of(j["tail"], path + ".tail");
            return Domain::box(iv, tail);
        }
        if (kind == "void") {
            std::string label = j.contains("label") ? str_field(j, "label", path) : "set";
            std::optional<Interval> sup;
            if (j.contains("support")) sup = interval_of(j["support"], path + ".support");
            return Domain::void_set(label, sup);
        }
        fail(path, "unknown domain kind '" + kind + "'");
    });
}

json domain_to_json(const Domain& d) {
    switch (d.kind()) {
        case Domain::Kind::Interval:
            return json{{"kind", "interval"}, {"lo", d.axes()[0].lo}, {"hi", d.axes()[0].hi}};
        case Domain::Kind::Box: {
            json axes = json::array();
            for (const Interval& iv : d.axes()) axes.push_back(interval_json(iv));
            json out{{"kind", "box"}, {"axes", axes}};
            if (d.tail()) out["tail"] = interval_json(*d.tail());
            return out;
        }
        case Domain::Kind::Void: {
            json out{{"kind", "void"}, {"label", d.label()}};
            if (d.support()) out["support"] = interval_json(*d.support());
            return out;
        }
    }
    return json();
}

Measure measure_from_json(const json& j, const std::string& path) {
    const std::string kind = str_field(j, "kind", path);
    return wrap(path, [&] {
        if (kind == "lebesgue") return Measure::lebesgue();
        if (kind == "weighted") return Measure::weighted(fn_from_json(field(j, "weight", path), path + ".weight"));
        if (kind == "discrete") {
            const json& atoms = field(j, "atoms", path);
            if (!atoms.is_array()) fail(path + ".atoms", "expected an array");
            std::vector<Atom> a;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                const Interval pm = interval_of(atoms[i], path + ".atoms[" + std::to_string(i) + "]");
                a.push_back(Atom{pm.lo, pm.hi});
            }
            return Measure::discrete(a);
        }
        if (kind == "product") {
            const json& fs = field(j, "factors", path);
            if (!fs.is_array()) fail(path + ".factors", "expected an array");
            std::vector<Measure> m;
            for (std::size_t i = 0; i < fs.size(); ++i)
                m.push_back(measure_from_json(fs[i], path + ".factors[" + std::to_string(i) + "]"));
            return Measure::product(m);
        }
        fail(path, "unknown measure kind '" + kind + "'");
    });
}

json measure_to_json(const Measure& m) {
    switch (m.kind()) {
        case Measure::Kind::Lebesgue: return json{{"kind", "lebesgue"}};
        case Measure::Kind::Weighted: return json{{"kind", "weighted"}, {"weight", fn_to_json(m.weight())}};
        case Measure::Kind::Discrete: {
            json atoms = json::array();
            for (const Atom& a : m.atoms()) atoms.push_back(json::array({a.point, a.mass}));
            return json{{"kind", "discrete"}, {"atoms", atoms}};
        }
        case Measure::Kind::Product: {
            json fs = json::array();
            for (const Measure& f : m.factors()) fs.push_back(measure_to_json(f));
            return json{{"kind", "product"}, {"factors", fs}};
        }
    }
    return json();
}

Kernel kernel_from_json(const json& j, const std::string& path) {
    const std::string fam = str_field(j, "family", path);
    return wrap(path, [&] {
        if (fam == "constant") return Kernel::constant(num_field(j, "c", path));
        if (fam == "separable") {
            const Monotone mono = j.contains("monotone")
                                      ? monotone_of(str_field(j, "monotone", path), path + ".monotone")
                                      : Monotone::Auto;
            return Kernel::separable(fn_from_json(field(j, "k0", path), path + ".k0"),
                                     fn_from_json(field(j, "k1", path), path + ".k1"), mono);
        }
        if (fam == "fractional")
            return Kernel::fractional(num_field(j, "alpha", path), num_or(j, "beta", 0.0, path),
                                      num_or(j, "t0", 0.0, path), num_or(j, "coef", 1.0, path));
        if (fam == "transformed_fractional") {
            const ScalarFn phi = fn_from_json(field(j, "phi", path), path + ".phi");
            const ScalarFn dphi =
                j.contains("phi_dot") ? fn_from_json(j["phi_dot"], path + ".phi_dot") : phi.derivative();
            return Kernel::transformed_fractional(phi, dphi, num_array(field(j, "alpha", path), path + ".alpha"),
                                                  num_array(field(j, "beta", path), path + ".beta"),
                                                  num_or(j, "t0", 0.0, path));
        }
        if (fam == "sum" || fam == "product") {
            const char* key = fam == "sum" ? "parts" : "factors";
            const json& ps = field(j, key, path);
            if (!ps.is_array()) fail(path + "." + key, "expected an array");
            std::vector<Kernel> ks;
            for (std::size_t i = 0; i < ps.size(); ++i)
                ks.push_back(kernel_from_json(ps[i], path + "." + key + "[" + std::to_string(i) + "]"));
            if (fam == "sum") return Kernel::sum(ks);
            std::optional<ScalarFn> tail;
            if (j.contains("tail")) tail = fn_from_json(j["tail"], path + ".tail");
            return Kernel::product(ks, tail);
        }
        if (fam == "void") return Kernel::void_kernel(fn_from_json(field(j, "k1", path), path + ".k1"));
        if (fam == "multiplicative")
            return Kernel::multiplicative(fn_from_json(field(j, "density", path), path + ".density"));
        fail(path, "unknown kernel family '" + fam + "'");
    });
}

json kernel_to_json(const Kernel& k) {
    switch (k.family()) {
        case Kernel::Family::Separable: {
            double c = 0.0;
            if (k.is_constant(&c) && k.k1().param(0) == 1.0 && k.k0_monotone() == Monotone::Constant)
                return json{{"family", "constant"}, {"c", c}};
            return json{{"family", "separable"},
                        {"k0", fn_to_json(k.k0())},
                        {"k1", fn_to_json(k.k1())},
                        {"monotone", monotone_name(k.k0_monotone())}};
        }
        case Kernel::Family::Fractional:
            return json{{"family", "fractional"}, {"alpha", k.alpha()}, {"beta", k.beta()},
                        {"t0", k.t0()},           {"coef", k.coef()}};
        case Kernel::Family::TransformedFractional:
            return json{{"family", "transformed_fractional"},
                        {"phi", fn_to_json(k.phi())},
                        {"phi_dot", fn_to_json(k.phi_dot())},
                        {"alpha", k.alphas()},
                        {"beta", k.betas()},
                        {"t0", k.t0()}};
        case Kernel::Family::Sum:
        case Kernel::Family::Product: {
            json ps = json::array();
            for (const Kernel& p : k.parts()) ps.push_back(kernel_to_json(p));
            if (k.family() == Kernel::Family::Sum) return json{{"family", "sum"}, {"parts", ps}};
            json out{{"family", "product"}, {"factors", ps}};
            if (k.tail_factor()) out["tail"] = fn_to_json(*k.tail_factor());
            return out;
        }
        case Kernel::Family::Void: return json{{"family", "void"}, {"k1", fn_to_json(k.k1())}};
        case Kernel::Family::Multiplicative:
            return json{{"family", "multiplicative"}, {"density", fn_to_json(k.nu_density())}};
    }
    return json();
}

void ProblemConfig::validate() const {
    if (!(p >= 1.0)) throw ConfigError("config: params.p must be >= 1");
    if (n < 1) throw ConfigError("config: params.n must be >= 1");
    if (grid_level < 1) throw ConfigError("config: params.grid_level must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("config: params.tol must be positive");
    measure.validate(domain);
    kernel.validate(p);
    kernel.validate_domain(domain);
    if (gronwall && gronwall->l) {
        gronwall->l->validate(p);
        gronwall->l->validate_domain(domain);
    }
}

ProblemConfig problem_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "domain" && k != "measure" && k != "kernel" && k != "params" && k != "gronwall")
            throw ConfigError("config: unknown top-level key '" + k + "'");
    }
    ProblemConfig c;
    c.domain = domain_from_json(field(j, "domain", "config"));
    c.measure = j.contains("measure") ? measure_from_json(j["measure"]) : Measure::lebesgue();
    c.kernel = kernel_from_json(field(j, "kernel", "config"));
    if (j.contains("params")) {
        const json& p = j["params"];
        if (!p.is_object()) throw ConfigError("config: params: expected an object");
        c.p = num_or(p, "p", c.p, "params");
        c.n = static_cast<int>(num_or(p, "n", c.n, "params"));
        c.grid_level = static_cast<int>(num_or(p, "grid_level", c.grid_level, "params"));
        c.tol = num_or(p, "tol", c.tol, "params");
    }
    if (j.contains("gronwall")) {
        const json& g = j["gronwall"];
        if (!g.is_object()) throw ConfigError("config: gronwall: expected an object");
        GronwallConfig gc;
        if (g.contains("v0")) gc.v0 = fn_from_json(g["v0"], "gronwall.v0");
        if (g.contains("l")) gc.l = kernel_from_json(g["l"], "gronwall.l");
        if (g.contains("points")) {
            const json& pts = g["points"];
            if (!pts.is_array()) throw ConfigError("config: gronwall.points: expected an array");
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const std::string pp = "gronwall.points[" + std::to_string(i) + "]";
                if (pts[i].is_number()) gc.points.push_back({pts[i].get<double>()});
                else gc.points.push_back(num_array(pts[i], pp));
            }
        }
        c.gronwall = gc;
    }
    c.validate();
    return c;
}

json problem_to_json(const ProblemConfig& c) {
    json out{{"domain", domain_to_json(c.domain)},
             {"measure", measure_to_json(c.measure)},
             {"kernel", kernel_to_json(c.kernel)},
             {"params", {{"p", c.p}, {"n", c.n}, {"grid_level", c.grid_level}, {"tol", c.tol}}}};
    if (c.gronwall) {
        json g{{"v0", fn_to_json(c.gronwall->v0)}};
        if (c.gronwall->l) g["l"] = kernel_to_json(*c.gronwall->l);
        json pts = json::array();
        for (const Point& p : c.gronwall->points) pts.push_back(p);
        g["points"] = pts;
        out["gronwall"] = g;
    }
    return out;
}

ProblemConfig load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config: malformed JSON in '" + path + "': " + e.what());
    }
    return problem_from_json(j);
}

void RunConfig::validate() const {
    if (subcommand != "resolvent" && subcommand != "ml" && subcommand != "gronwall" && subcommand != "solve" &&
        subcommand != "selftest")
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    if (output != "csv" && output != "json") throw ConfigError("--format must be csv or json");
    if (grid_level < 1) throw ConfigError("--grid-level must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("--tol must be positive");
    if (max_iter < 1) throw ConfigError("--max-iter must be >= 1");
    if (n < 1) throw ConfigError("--n must be >= 1");
}

RunConfig run_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("run config: expected an object");
    RunConfig c;
    try {
        c.subcommand = j.value("subcommand", c.subcommand);
        c.config_path = j.value("config", c.config_path);
        c.output = j.value("format", c.output);
        c.out_path = j.value("out", c.out_path);
        c.grid_level = j.value("grid_level", c.grid_level);
        c.tol = j.value("tol", c.tol);
        c.seed = j.value("seed", c.seed);
        c.n = j.value("n", c.n);
        c.alpha = j.value("alpha", c.alpha);
        c.beta = j.value("beta", c.beta);
        c.p = j.value("p", c.p);
        c.z = j.value("z", c.z);
        c.max_iter = j.value("max_iter", c.max_iter);
        c.problem = j.value("problem", c.problem);
        c.lambda = j.value("lambda", c.lambda);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    c.validate();
    return c;
}

json run_to_json(const RunConfig& c) {
    return json{{"subcommand", c.subcommand}, {"config", c.config_path}, {"format", c.output},
                {"out", c.out_path},          {"grid_level", c.grid_level}, {"tol", c.tol},
                {"seed", c.seed},             {"n", c.n},                   {"alpha", c.alpha},
                {"beta", c.beta},             {"p", c.p},                   {"z", c.z},
                {"max_iter", c.max_iter},     {"problem", c.problem},       {"lambda", c.lambda}};
}

bool operator==(const RunConfig& a, const RunConfig& b) { return run_to_json(a) == run_to_json(b); }

}  // namespace volres
