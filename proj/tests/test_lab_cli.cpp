#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "paracalc/scenario.hpp"
#include "paracalc/svg.hpp"

using namespace paracalc;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "schema_version": 1,
  "name": "small",
  "seed": 0,
  "system": { "preset": "constant", "n": 64, "m": 2, "a0": [[1.0, 0.5], [0.5, -1.0]] },
  "solver": { "cfl": 0.4, "t_end": 0.5 },
  "schedule": { "s": 0.5, "beta": 0.0, "T_star": 0.5, "mu": 2 },
  "initial": [ { "k": 1, "amp": 1.0, "component": 0 }, { "k": 2, "amp": 0.3, "component": 1 } ],
  "loss": { "j_lo": 3, "j_hi": 4, "s": 0.5, "beta_hat_max": BETA_MAX },
  "steps": ["hyperbolic", "symmetrizer", "energy", "conservation", "loss"]
})";

std::string small_text(const std::string& beta_max = "0.05") {
    std::string t = kSmall;
    t.replace(t.find("BETA_MAX"), 8, beta_max);
    return t;
}

fs::path temp_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("paracalc_test_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

std::string what_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const SchemaError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("well formed scenario parses") {
    const Scenario sc = parse_scenario(small_text());
    CHECK(sc.name == "small");
    CHECK(sc.system.n == 64);
    CHECK(sc.system.a0(0, 1) == doctest::Approx(0.5));
    CHECK(sc.steps.size() == 5);
    CHECK(sc.initial.size() == 2);
    CHECK(sc.beta_hat_max.value() == doctest::Approx(0.05));
}

TEST_CASE("malformed JSON names the position") {
    const std::string w = what_of("{\n  \"name\": \"x\",\n  oops\n}");
    CHECK(w.find("line 3") != std::string::npos);
}

TEST_CASE("unknown and mistyped fields name their path") {
    std::string t = small_text();
    t.replace(t.find("\"cfl\""), 5, "\"cfx\"");
    CHECK(what_of(t).find("solver.cfx") != std::string::npos);
    std::string u = small_text();
    u.replace(u.find("\"n\": 64"), 7, "\"n\": \"x\"");
    CHECK(what_of(u).find("system.n") != std::string::npos);
}

TEST_CASE("schema version mismatch is rejected") {
    std::string t = small_text();
    t.replace(t.find("\"schema_version\": 1"), 19, "\"schema_version\": 7");
    CHECK(what_of(t).find("schema_version") != std::string::npos);
}

TEST_CASE("unknown step and lifespan violation are rejected") {
    std::string t = small_text();
    t.replace(t.find("\"loss\"]"), 7, "\"fly\"]");
    CHECK_FALSE(what_of(t).empty());
    std::string u = small_text();
    u.replace(u.find("\"beta\": 0.0"), 11, "\"beta\": 2.0");
    CHECK_FALSE(what_of(u).empty());
}

TEST_CASE("initial data is the sum of its modes") {
    const Scenario sc = parse_scenario(small_text());
    const GridFunction u = initial_data(sc);
    CHECK(u.components() == 2);
    const VectorXd x = grid_points(64);
    CHECK(std::abs(u.values(5, 0) - cplx(std::cos(x(5)))) < 1e-14);
    CHECK(std::abs(u.values(5, 1) - cplx(0.3 * std::cos(2.0 * x(5)))) < 1e-14);
}

TEST_CASE("baseline path sits next to the scenario") {
    CHECK(baseline_path("dir/a.json") == "dir/a.baseline.json");
}

TEST_CASE("empty probe selection gives an empty passing report") {
    bool pass = false;
    const auto r = run_probe_suite({}, 0, pass);
    CHECK(pass);
    CHECK(r["probes"].empty());
    CHECK_THROWS_AS(run_probe_suite({"no_such_probe"}, 0, pass), std::invalid_argument);
}

TEST_CASE("probe registry is complete") {
    const auto& names = probe_names();
    for (const char* n : {"dyadic", "norms", "mollifier", "symmetrizer", "no_loss", "loss", "commutator", "oracle"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
}

TEST_CASE("checks and rounding") {
    CHECK(make_check("a", 1.0, "<=", 2.0).pass);
    CHECK_FALSE(make_check("a", 3.0, "<=", 2.0).pass);
    CHECK(make_check("a", -0.05, "abs<=", 0.1).pass);
    CHECK_FALSE(make_check("a", std::nan(""), ">=", 0.0).pass);
    ProbeOutcome o;
    o.checks.push_back(make_check("diag", 5.0, "<=", 1.0, false));
    CHECK(o.pass());
    CHECK(r12(0.1234567890123456) == 0.123456789012);
}

TEST_CASE("empty series renders axes only") {
    Panel p;
    p.title = "empty";
    p.series.push_back(Series{});
    const std::string svg = render_svg({p});
    CHECK(count(svg, "<path") == 0);
    CHECK(count(svg, "<line") > 0);
}

TEST_CASE("one path per series") {
    Panel p;
    p.series.push_back(Series{"a", {0, 1, 2}, {1, 2, 3}});
    p.series.push_back(Series{"b", {0, 1, 2}, {3, 2, 1}, true});
    CHECK(count(render_svg({p}), "<path") == 2);
}

TEST_CASE("plot kinds and schema checks") {
    const fs::path d = temp_dir("plot");
    write_file(d / "energy.csv", "t,s_t,E,E_log,norm_Hs_t,margin\n0,0.5,1,2,1,0.1\n0.5,0.5,1.1,2.1,1,0.1\n");
    CHECK(count(plot_csv((d / "energy.csv").string(), "energy"), "<path") == 2);
    std::string loss = "j,t,g,rate,corr\n";
    for (int j = 3; j <= 5; ++j)
        for (int l = 0; l < 4; ++l)
            loss += std::to_string(j) + "," + std::to_string(0.25 * l) + "," + std::to_string(0.1 * j * l) + "," +
                    std::to_string(0.1 * j) + ",0.99\n";
    write_file(d / "loss.csv", loss);
    CHECK(count(plot_csv((d / "loss.csv").string(), "loss"), "<path") == 3 + 2);
    CHECK_THROWS_AS(plot_csv((d / "energy.csv").string(), "loss"), std::invalid_argument);
    CHECK_THROWS_AS(plot_csv((d / "energy.csv").string(), "pie"), std::invalid_argument);
}

TEST_CASE("scenario run writes a deterministic report") {
    const fs::path d = temp_dir("run");
    write_file(d / "small.json", small_text());
    std::ostringstream log;
    const RunResult a = run_scenario((d / "small.json").string(), {(d / "a").string(), false}, log);
    CHECK(a.exit_code == 0);
    CHECK(fs::exists(d / "a" / "report.json"));
    CHECK(fs::exists(d / "a" / "energy.csv"));
    CHECK(fs::exists(d / "a" / "plots" / "energy.svg"));
    const RunResult b = run_scenario((d / "small.json").string(), {(d / "b").string(), false}, log);
    CHECK(read_file(d / "a" / "report.json") == read_file(d / "b" / "report.json"));
}

TEST_CASE("rebaseline writes a baseline that the next run checks") {
    const fs::path d = temp_dir("rebase");
    write_file(d / "small.json", small_text());
    std::ostringstream log;
    CHECK(run_scenario((d / "small.json").string(), {(d / "o").string(), true}, log).exit_code == 0);
    REQUIRE(fs::exists(d / "small.baseline.json"));
    const RunResult r = run_scenario((d / "small.json").string(), {(d / "o2").string(), false}, log);
    CHECK(r.exit_code == 0);
    CHECK(r.report.dump().find("baseline:small.baseline.json") != std::string::npos);
}

TEST_CASE("rebaseline refuses when a fixed check fails") {
    const fs::path d = temp_dir("refuse");
    write_file(d / "small.json", small_text("-1.0"));
    std::ostringstream log;
    const RunResult r = run_scenario((d / "small.json").string(), {(d / "o").string(), true}, log);
    CHECK(r.exit_code == 1);
    CHECK_FALSE(fs::exists(d / "small.baseline.json"));
}

TEST_CASE("malformed scenario file maps to exit code 2") {
    const fs::path d = temp_dir("bad");
    write_file(d / "bad.json", "{ \"name\": ");
    std::ostringstream log;
    CHECK(run_scenario((d / "bad.json").string(), {(d / "o").string(), false}, log).exit_code == 2);
    CHECK(run_scenario((d / "missing.json").string(), {(d / "o").string(), false}, log).exit_code == 2);
}

TEST_CASE("seed override from the environment") {
    const fs::path d = temp_dir("seed");
    write_file(d / "small.json", small_text());
    setenv("PARACALC_SEED", "9", 1);
    std::ostringstream log;
    const RunResult r = run_scenario((d / "small.json").string(), {(d / "o").string(), false}, log);
    unsetenv("PARACALC_SEED");
    CHECK(r.report["seed"] == 9);
    CHECK(log.str().find("PARACALC_SEED=9") != std::string::npos);
    setenv("PARACALC_SEED", "abc", 1);
    CHECK_THROWS_AS(seed_override(), SchemaError);
    unsetenv("PARACALC_SEED");
}
