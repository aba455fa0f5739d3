#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "volres/kernels.hpp"
#include "volres/measure.hpp"
#include "volres/scalar_fn.hpp"

namespace volres {

using json = nlohmann::json;

// JSON forms of the model objects. Parsing throws ConfigError with the path
// of the offending field.
//
//   fn:      number | {"kind": "const", "c"} | {"kind": "power", "coef", "exponent", "shift"}
//            | {"kind": "exp", "coef", "rate"} | {"kind": "linear", "a", "b"}
//   domain:  {"kind": "interval", "lo", "hi"}
//            | {"kind": "box", "axes": [[lo, hi], ...], "tail": [lo, hi]?}
//            | {"kind": "void", "label", "support": [lo, hi]?}
//   measure: {"kind": "lebesgue"} | {"kind": "weighted", "weight": fn}
//            | {"kind": "discrete", "atoms": [[point, mass], ...]}
//            | {"kind": "product", "factors": [measure, ...]}
//   kernel:  {"family": "constant", "c"}
//            | {"family": "separable", "k0": fn, "k1": fn, "monotone"?}
//            | {"family": "fractional", "alpha", "beta", "t0", "coef"?}
//            | {"family": "transformed_fractional", "phi": fn, "phi_dot": fn?, "alpha": [..], "beta": [..], "t0"}
//            | {"family": "sum", "parts": [kernel, ...]}
//            | {"family": "product", "factors": [kernel, ...], "tail": fn?}
//            | {"family": "void", "k1": fn}
//            | {"family": "multiplicative", "density": fn}

ScalarFn fn_from_json(const json& j, const std::string& path = "fn");
json fn_to_json(const ScalarFn& f);

Domain domain_from_json(const json& j, const std::string& path = "domain");
json domain_to_json(const Domain& d);

Measure measure_from_json(const json& j, const std::string& path = "measure");
json measure_to_json(const Measure& m);

Kernel kernel_from_json(const json& j, const std::string& path = "kernel");
json kernel_to_json(const Kernel& k);

/// Gronwall data: v0 is a function of the first coordinate; points are the
/// evaluation points of the bound curve.
struct GronwallConfig {
    ScalarFn v0 = ScalarFn::constant(0.0);
    std::optional<Kernel> l;
    std::vector<Point> points;
};

/// A problem file: {"domain", "measure", "kernel", "params": {"p", "n", "grid_level", "tol"}, "gronwall"?}.
struct ProblemConfig {
    Domain domain = Domain::interval(0.0, 1.0);
    Measure measure = Measure::lebesgue();
    Kernel kernel = Kernel::constant(1.0);
    double p = 1.0;
    int n = 3;
    int grid_level = 5;
    double tol = 1e-10;
    std::optional<GronwallConfig> gronwall;

    /// Checks model invariants (measure fits domain, kernel fits domain and p).
    void validate() const;
};

ProblemConfig problem_from_json(const json& j);
json problem_to_json(const ProblemConfig& c);
ProblemConfig load_problem(const std::string& path);

/// Command-line run settings.
struct RunConfig {
    std::string subcommand;
    std::string config_path;
    std::string output = "csv";
    std::string out_path;
    int grid_level = 5;
    double tol = 1e-10;
    unsigned long long seed = 42;
    int n = 3;
    double alpha = 1.0;
    double beta = 1.0;
    double p = 1.0;
    double z = 1.0;
    int max_iter = 50;
    std::string problem = "volterra";
    double lambda = 2.0;

    /// grid_level >= 1, tol > 0, known subcommand and output format.
    void validate() const;
};

RunConfig run_from_json(const json& j);
json run_to_json(const RunConfig& c);
bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace volres
