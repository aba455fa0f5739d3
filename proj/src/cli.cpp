#include "volres/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "volres/acceptance.hpp"
#include "volres/errors.hpp"
#include "volres/fixpoint.hpp"
#include "volres/gronwall.hpp"
#include "volres/io.hpp"
#include "volres/resolvent.hpp"
#include "volres/specfun.hpp"
#include "volres/volterra_weights.hpp"

namespace volres {

namespace {

const char* const kSubcommands[] = {"resolvent", "ml", "gronwall", "solve", "selftest"};

json num(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }
json num(const ExtReal& v) { return v.is_finite() ? json(v.value()) : json("inf"); }
std::string csv(const ExtReal& v) { return v.is_finite() ? format_double(v.value()) : "inf"; }

// Flags given on the command line win over params stored in the problem file.
struct Overrides {
    bool grid_level = false, tol = false, n = false, p = false;
};

ProblemConfig problem_for(const RunConfig& rc, const Overrides& ov) {
    if (rc.config_path.empty()) throw ConfigError(rc.subcommand + ": --config is required");
    ProblemConfig pc = load_problem(rc.config_path);
    if (ov.grid_level) pc.grid_level = rc.grid_level;
    if (ov.tol) pc.tol = rc.tol;
    if (ov.n) pc.n = rc.n;
    if (ov.p) pc.p = rc.p;
    pc.validate();
    return pc;
}

void cmd_resolvent(const RunConfig& rc, const Overrides& ov, std::ostream& os) {
    const ProblemConfig pc = problem_for(rc, ov);
    const QuadratureGrid grid = make_grid(pc.domain, pc.measure, pc.grid_level);
    const ResolventTable tab = iterated_kernels(pc.kernel, pc.measure, pc.p, pc.n, grid);
    if (rc.output == "json") os << tab.to_json() << '\n';
    else tab.write_csv(os);
}

void cmd_ml(const RunConfig& rc, std::ostream& os) {
    const SeriesValue v = mittag_leffler({rc.alpha, rc.beta, rc.p}, rc.z, rc.tol);
    if (v.divergent || v.sum.is_infinite()) throw NumericalFailure("ml: series diverges");
    if (rc.output == "json") {
        os << json{{"alpha", rc.alpha}, {"beta", rc.beta}, {"p", rc.p},           {"z", rc.z},
                   {"value", num(v.sum)}, {"tail_bound", num(v.tail_bound)}, {"terms", v.terms_used}}
                  .dump(2)
           << '\n';
    } else {
        os << "value,tail_bound,terms\n"
           << csv(v.sum) << ',' << csv(v.tail_bound) << ',' << v.terms_used << '\n';
    }
}

std::vector<Point> default_points(const ProblemConfig& pc) {
    const int level = pc.domain.ordered_dim() > 1 ? 2 : 4;
    return make_grid(pc.domain, pc.measure, level).nodes;
}

void cmd_gronwall(const RunConfig& rc, const Overrides& ov, std::ostream& os) {
    const ProblemConfig pc = problem_for(rc, ov);
    if (!pc.gronwall) throw ConfigError("gronwall: config has no \"gronwall\" section");
    GronwallInput in;
    in.k = pc.kernel;
    in.l = pc.gronwall->l;
    in.domain = pc.domain;
    in.measure = pc.measure;
    in.p = pc.p;
    const ScalarFn v0 = pc.gronwall->v0;
    in.v0 = [v0](const Point& x) { return v0(x.at(0)); };
    in.grid_level = pc.grid_level;
    in.tol = pc.tol;
    const std::vector<Point> pts = pc.gronwall->points.empty() ? default_points(pc) : pc.gronwall->points;
    const BoundCurve curve = gronwall_curve(in, pts);
    if (rc.output == "json") {
        json arr = json::array();
        for (const BoundPoint& b : curve.points)
            arr.push_back({{"t", b.t}, {"sharp", num(b.sharp)}, {"sup", num(b.sup)}, {"tail", num(b.tail)}});
        os << json{{"m", curve.m}, {"tail_bound", num(curve.tail_bound)}, {"points", arr}}.dump(2) << '\n';
        return;
    }
    const std::size_t dim = curve.points.empty() ? 1 : curve.points.front().t.size();
    if (dim == 1) {
        os << "t";
    } else {
        for (std::size_t a = 0; a < dim; ++a) os << (a ? ",t" : "t") << a + 1;
    }
    os << ",sharp,sup,tail\n";
    for (const BoundPoint& b : curve.points) {
        for (std::size_t a = 0; a < b.t.size(); ++a) os << (a ? "," : "") << format_double(b.t[a]);
        os << ',' << csv(b.sharp) << ',' << csv(b.sup) << ',' << format_double(b.tail) << '\n';
    }
}

void cmd_solve(const RunConfig& rc, std::ostream& os) {
    CatalogProblem pr;
    if (rc.problem == "volterra") pr = linear_volterra_problem(rc.lambda, rc.grid_level);
    else if (rc.problem == "abel") pr = abel_problem(rc.alpha, rc.lambda, rc.grid_level);
    else if (rc.problem == "banach") pr = banach_problem(rc.lambda, 1.0, 0.0);
    else throw ConfigError("solve: unknown problem '" + rc.problem + "' (volterra, abel, banach)");
    PicardOptions po;
    po.tol = rc.tol;
    po.max_iter = rc.max_iter;
    const PicardResult sol = picard_solve(pr.op, pr.x0, po);
    const std::size_t N = pr.op.grid.size();
    const int n_rows = static_cast<int>(sol.cert.B.size());
    json rows = json::array();
    if (rc.output == "csv") os << "n,t,measured_error_vs_reference,certified_bound\n";
    for (int n = 1; n <= std::min(sol.cert.iterates, n_rows); ++n) {
        const GridFn d = distance_profile(pr.op, sol.iterates[n], pr.reference);
        for (std::size_t i = 0; i < N; ++i) {
            const ExtReal B = error_bound(sol.cert, n, i).table;
            const double t = pr.op.grid.nodes[i].empty() ? 0.0 : pr.op.grid.nodes[i][0];
            if (rc.output == "csv")
                os << n << ',' << format_double(t) << ',' << format_double(d[i]) << ',' << csv(B) << '\n';
            else
                rows.push_back({{"n", n}, {"t", t}, {"measured_error_vs_reference", num(d[i])},
                                {"certified_bound", num(B)}});
        }
    }
    if (rc.output == "json")
        os << json{{"problem", pr.name},         {"reference", pr.reference_kind},
                   {"converged", sol.cert.converged}, {"iterates", sol.cert.iterates},
                   {"residual", num(sol.residual)},   {"rows", rows}}
                  .dump(2)
           << '\n';
    if (!sol.cert.converged)
        throw NumericalFailure("solve: no convergence to tol within " + std::to_string(rc.max_iter) + " iterations");
}

int cmd_selftest(const RunConfig& rc, std::ostream& os) {
    const std::vector<CriterionResult> res = run_acceptance(rc.seed);
    if (rc.output == "json") {
        json arr = json::array();
        for (const auto& r : res)
            arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        os << arr.dump(2) << '\n';
    } else {
        print_acceptance(os, res);
    }
    return all_passed(res) ? kExitOk : kExitNumerical;
}

std::string resolve_out(const std::string& path) {
    namespace fs = std::filesystem;
    const char* dir = std::getenv("VOLRES_OUTPUT_DIR");
    if (dir && *dir && fs::path(path).is_relative()) return (fs::path(dir) / path).string();
    return path;
}

int dispatch(const RunConfig& rc, const Overrides& ov, std::ostream& out, std::ostream& err) {
    std::ostringstream buf;
    int code = kExitOk;
    try {
        rc.validate();
        if (rc.subcommand == "resolvent") cmd_resolvent(rc, ov, buf);
        else if (rc.subcommand == "ml") cmd_ml(rc, buf);
        else if (rc.subcommand == "gronwall") cmd_gronwall(rc, ov, buf);
        else if (rc.subcommand == "solve") cmd_solve(rc, buf);
        else code = cmd_selftest(rc, buf);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        code = kExitNumerical;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    if (rc.out_path.empty()) {
        out << buf.str();
    } else {
        const std::string path = resolve_out(rc.out_path);
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            err << "error: cannot write '" << path << "'\n";
            return kExitConfig;
        }
        f << buf.str();
    }
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
        bool known = false;
        for (const char* s : kSubcommands) known = known || args[0] == s;
        if (!known) {
            err << "error: unknown subcommand '" << args[0] << "' (resolvent, ml, gronwall, solve, selftest)\n";
            return kExitConfig;
        }
    }

    CLI::App app{"Resolvent kernels, Gronwall bounds and certified Picard iteration", "volres-cli"};
    app.require_subcommand(1);
    RunConfig rc;
    bool emit_config = false;
    std::string run_config;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", rc.config_path, "problem JSON file");
        sub->add_option("--out", rc.out_path, "output file (relative paths resolve against VOLRES_OUTPUT_DIR)");
        sub->add_option("--format", rc.output, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--grid-level", rc.grid_level, "grid refinement level");
        sub->add_option("--tol", rc.tol, "tolerance");
        sub->add_option("--seed", rc.seed, "seed for randomised checks");
        sub->add_option("--n", rc.n, "number of iterated kernels");
        sub->add_option("--alpha", rc.alpha);
        sub->add_option("--beta", rc.beta);
        sub->add_option("--p", rc.p, "exponent p >= 1");
        sub->add_option("--z", rc.z);
        sub->add_option("--max-iter", rc.max_iter, "Picard iteration cap");
        sub->add_option("--problem", rc.problem, "volterra, abel or banach");
        sub->add_option("--lambda", rc.lambda, "problem parameter");
        sub->add_option("--run-config", run_config, "JSON run configuration (flags given as well take precedence)");
        sub->add_flag("--emit-config", emit_config, "print the effective run configuration as JSON and exit");
    };
    common(app.add_subcommand("resolvent", "iterated kernels R_n on a grid (--config, --n)"));
    common(app.add_subcommand("ml", "generalised Mittag-Leffler function (--alpha, --beta, --p, --z)"));
    common(app.add_subcommand("gronwall", "both lines of the Gronwall bound at the config points (--config)"));
    common(app.add_subcommand("solve", "certified Picard iteration on a catalog problem (--problem, --lambda)"));
    common(app.add_subcommand("selftest", "run the acceptance suite"));

    std::vector<std::string> argv_store{"volres-cli"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    CLI::App* sub = app.get_subcommands().front();
    rc.subcommand = sub->get_name();

    Overrides ov;
    ov.grid_level = sub->count("--grid-level") > 0;
    ov.tol = sub->count("--tol") > 0;
    ov.n = sub->count("--n") > 0;
    ov.p = sub->count("--p") > 0;

    if (!run_config.empty()) {
        try {
            std::ifstream f(run_config);
            if (!f) throw ConfigError("cannot read run configuration '" + run_config + "'");
            json j;
            try {
                j = json::parse(f);
            } catch (const json::exception& e) {
                throw ConfigError("malformed run configuration: " + std::string(e.what()));
            }
            RunConfig base = run_from_json(j);
            if (base.subcommand != rc.subcommand)
                throw ConfigError("run configuration is for '" + base.subcommand + "', not '" + rc.subcommand + "'");
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (it.key() == "grid_level") ov.grid_level = true;
                if (it.key() == "tol") ov.tol = true;
                if (it.key() == "n") ov.n = true;
                if (it.key() == "p") ov.p = true;
            }
            auto keep = [&](const char* flag) { return sub->count(flag) > 0; };
            if (keep("--config")) base.config_path = rc.config_path;
            if (keep("--out")) base.out_path = rc.out_path;
            if (keep("--format")) base.output = rc.output;
            if (keep("--grid-level")) base.grid_level = rc.grid_level;
            if (keep("--tol")) base.tol = rc.tol;
            if (keep("--seed")) base.seed = rc.seed;
            if (keep("--n")) base.n = rc.n;
            if (keep("--alpha")) base.alpha = rc.alpha;
            if (keep("--beta")) base.beta = rc.beta;
            if (keep("--p")) base.p = rc.p;
            if (keep("--z")) base.z = rc.z;
            if (keep("--max-iter")) base.max_iter = rc.max_iter;
            if (keep("--problem")) base.problem = rc.problem;
            if (keep("--lambda")) base.lambda = rc.lambda;
            rc = base;
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return kExitConfig;
        }
    }

    if (emit_config) {
        try {
            rc.validate();
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return kExitConfig;
        }
        out << run_to_json(rc).dump(2) << '\n';
        return kExitOk;
    }
    return dispatch(rc, ov, out, err);
}

}  // namespace volres
