#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "volres/cli.hpp"
#include "volres/config.hpp"
#include "volres/errors.hpp"

using namespace volres;

namespace {

const std::string kConfigs = VOLRES_CONFIG_DIR;
const char* const kFamilies[] = {"constant", "separable", "fractional", "transformed_fractional",
                                 "sum",      "product",   "void",       "multiplicative"};

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell == "inf" ? INFINITY : std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::filesystem::path temp_dir() {
    const auto d = std::filesystem::temp_directory_path() / "volres_cli_test";
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("every example config parses and round-trips") {
    for (const char* fam : kFamilies) {
        CAPTURE(fam);
        const ProblemConfig c = load_problem(kConfigs + "/" + fam + ".json");
        const json once = problem_to_json(c);
        const json twice = problem_to_json(problem_from_json(once));
        CHECK(once == twice);
    }
}

TEST_CASE("malformed configs are rejected with a path") {
    json j = problem_to_json(load_problem(kConfigs + "/constant.json"));
    j["extra"] = 1;
    CHECK_THROWS_AS(problem_from_json(j), ConfigError);
    j.erase("extra");
    j["kernel"] = {{"family", "fractional"}, {"alpha", -1.0}};
    CHECK_THROWS_AS(problem_from_json(j), ConfigError);
    j["kernel"] = {{"family", "nonsense"}};
    try {
        problem_from_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("kernel") != std::string::npos);
    }
    CHECK_THROWS_AS(load_problem(kConfigs + "/does_not_exist.json"), ConfigError);
    const auto bad = temp_dir() / "bad.json";
    std::ofstream(bad) << "{ \"domain\": ";
    CHECK_THROWS_AS(load_problem(bad.string()), ConfigError);
}

TEST_CASE("run configs round-trip") {
    RunConfig rc;
    rc.subcommand = "solve";
    rc.problem = "abel";
    rc.alpha = 0.5;
    rc.tol = 1e-7;
    rc.seed = 7;
    CHECK(run_from_json(run_to_json(rc)) == rc);
    json bad = run_to_json(rc);
    bad["grid_level"] = 0;
    CHECK_THROWS_AS(run_from_json(bad), ConfigError);
    bad = run_to_json(rc);
    bad["subcommand"] = "plot";
    CHECK_THROWS_AS(run_from_json(bad), ConfigError);
}

}

TEST_SUITE("cli") {

TEST_CASE("ml prints e and a tail bound") {
    const Run r = cli({"ml", "--alpha", "1", "--beta", "1", "--p", "1", "--z", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("value,tail_bound,terms\n2.718281828", 0) == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 1);
    CHECK(std::abs(rows[0][0] - std::exp(1.0)) <= rows[0][1] + 1e-15);
}

TEST_CASE("resolvent layers of the constant kernel") {
    const Run r = cli({"resolvent", "--config", kConfigs + "/constant.json", "--n", "3", "--grid-level", "4"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("n,t,s,value\n", 0) == 0);
    int checked = 0;
    for (const auto& row : parse_csv(r.out)) {
        if (row[0] != 3.0) continue;
        const double d = row[1] - row[2];
        CHECK(row[3] == doctest::Approx(1.5 * 1.5 * 1.5 * d * d / 2.0).epsilon(1e-10).scale(1e-12));
        ++checked;
    }
    CHECK(checked == 17 * 18 / 2);
}

TEST_CASE("output is deterministic") {
    const std::vector<std::string> args{"gronwall", "--config", kConfigs + "/separable.json"};
    const Run a = cli(args), b = cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("t,sharp,sup,tail\n", 0) == 0);
}

TEST_CASE("gronwall on every config with a gronwall section") {
    for (const char* fam : {"constant", "separable", "sum", "product", "void", "multiplicative"}) {
        CAPTURE(fam);
        const Run r = cli({"gronwall", "--config", kConfigs + "/" + fam + ".json", "--format", "json"});
        CHECK(r.code == 0);
        CHECK(json::parse(r.out).contains("points"));
    }
}

TEST_CASE("solve emits certified bounds above the measured error") {
    const Run r = cli({"solve", "--problem", "volterra", "--lambda", "2", "--grid-level", "5", "--tol", "1e-6"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("n,t,measured_error_vs_reference,certified_bound\n", 0) == 0);
    for (const auto& row : parse_csv(r.out)) CHECK(row[2] <= row[3] + 1e-5);
    CHECK(cli({"solve", "--problem", "banach", "--lambda", "0.5"}).code == 0);
    CHECK(cli({"solve", "--problem", "abel", "--alpha", "0.5", "--lambda", "1", "--grid-level", "4"}).code == 0);
}

TEST_CASE("exit codes and messages") {
    const Run unknown = cli({"plot"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("unknown subcommand") != std::string::npos);
    const Run missing = cli({"resolvent", "--config", "/nonexistent/x.json"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("cannot read") != std::string::npos);
    const Run bad_flag = cli({"ml", "--grid-level", "0"});
    CHECK(bad_flag.code == 1);
    const Run no_conv = cli({"solve", "--problem", "volterra", "--max-iter", "2", "--tol", "1e-12"});
    CHECK(no_conv.code == 2);
    CHECK(no_conv.err.find("numerical failure") != std::string::npos);
    const Run no_section = cli({"gronwall", "--config", kConfigs + "/fractional.json"});
    CHECK(no_section.code == 1);
}

TEST_CASE("emitted run configuration re-parses") {
    const Run r = cli({"solve", "--problem", "abel", "--alpha", "0.6", "--tol", "1e-7", "--emit-config"});
    REQUIRE(r.code == 0);
    const RunConfig rc = run_from_json(json::parse(r.out));
    CHECK(rc.problem == "abel");
    CHECK(rc.alpha == 0.6);
    CHECK(run_to_json(rc) == json::parse(r.out));
    const auto path = temp_dir() / "run.json";
    std::ofstream(path) << r.out;
    const Run again = cli({"solve", "--run-config", path.string(), "--emit-config"});
    CHECK(again.out == r.out);
}

TEST_CASE("relative --out paths resolve against VOLRES_OUTPUT_DIR") {
    const auto dir = temp_dir();
    std::filesystem::remove(dir / "ml.csv");
    setenv("VOLRES_OUTPUT_DIR", dir.c_str(), 1);
    const Run r = cli({"ml", "--z", "2", "--out", "ml.csv"});
    unsetenv("VOLRES_OUTPUT_DIR");
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(std::filesystem::exists(dir / "ml.csv"));
}

}
