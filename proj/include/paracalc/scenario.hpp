#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "paracalc/energy.hpp"
#include "paracalc/probes.hpp"
#include "paracalc/solver.hpp"
#include "paracalc/systems.hpp"

namespace paracalc {

constexpr int kSchemaVersion = 1;

// Malformed or inconsistent scenario file; what() names the line or the field.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InitialMode {
    long k = 1;
    double amp = 1.0;
    double phase = 0.0;
    Index component = 0;
};

struct Scenario {
    std::string name;
    std::string path;
    std::uint64_t seed = 0;
    SystemSpec system;
    SolverConfig solver;
    EnergySchedule schedule;
    bool beta_fit = false;     // schedule.beta = beta_factor * beta_hat after the loss step
    bool mu_calibrate = false; // schedule.mu from calibrate_mu
    double beta_factor = 1.2;
    std::vector<InitialMode> initial;
    LossConfig loss;
    std::optional<double> beta_hat_min, beta_hat_max;
    double min_corr = 0.9;
    double gronwall_C1 = 1.01;
    double gronwall_C2 = 0.0;
    bool gronwall_refined = false;
    double conservation_tol = 1e-8;
    double residual_tol = 1e-10;
    double mu_max = 64.0;
    double commutator_ratio = 1e-2;
    std::vector<std::string> steps;
};

// Parses and validates; unknown keys are schema violations too.
Scenario parse_scenario(const std::string& text, const std::string& path = "<memory>");
Scenario load_scenario(const std::string& path);

// Sibling file next to the scenario: name.json -> name.baseline.json.
std::string baseline_path(const std::string& scenario_path);

GridFunction initial_data(const Scenario& sc);

struct RunOptions {
    std::string out_dir;  // empty: out/<scenario name>
    bool rebaseline = false;
};

struct RunResult {
    int exit_code = 0;  // 0 pass, 1 check failure, 2 schema violation, 3 numerical guard
    nlohmann::ordered_json report;
    std::string message;
};

// Runs every step, writes report.json, csv files and plots/*.svg into the output directory.
RunResult run_scenario(const std::string& path, const RunOptions& opt, std::ostream& log);

// Registered probes by name ("all" expands to every name); empty selection gives an empty report.
nlohmann::ordered_json run_probe_suite(const std::vector<std::string>& names, std::uint64_t seed, bool& pass);

// Seed override from PARACALC_SEED, if set and valid.
std::optional<std::uint64_t> seed_override();

// Order-probe rows (probe, s, alpha, j, log2_ratio) collected from probe outcome details.
void write_order_csv(const std::string& path, const std::vector<ProbeOutcome>& outcomes);

}  // namespace paracalc
