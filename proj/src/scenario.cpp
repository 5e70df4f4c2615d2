#include "paracalc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "paracalc/svg.hpp"

namespace paracalc {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string>& scenario_steps() {
    static const std::vector<std::string> s = {"hyperbolic", "symmetrizer", "calibrate", "energy", "conservation",
                                               "loss",       "gronwall",    "commutator"};
    return s;
}

const std::vector<std::string>& presets() {
    static const std::vector<std::string> p = {"constant",  "smooth",    "ll_x",             "ll_t",
                                               "ll_tx",     "wave",      "wave_ll_x",        "wave_lipschitz_t",
                                               "wave_ll_t", "eigenframe_ll_t"};
    return p;
}

// Field access with a dotted path for diagnostics; every key must be consumed.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_.empty() ? "top level" : path_, "expected an object");
    }

    bool has(const std::string& k) const { return j_.contains(k); }

    const json& raw(const std::string& k) {
        used_.insert(k);
        return j_.at(k);
    }

    double number(const std::string& k, double def) {
        if (!has(k)) return def;
        const json& v = raw(k);
        if (!v.is_number()) fail(at(k), "expected a number");
        return v.get<double>();
    }
    double required_number(const std::string& k) {
        if (!has(k)) fail(at(k), "required field is missing");
        return number(k, 0.0);
    }
    long integer(const std::string& k, long def) {
        if (!has(k)) return def;
        const json& v = raw(k);
        if (!v.is_number_integer()) fail(at(k), "expected an integer");
        return v.get<long>();
    }
    bool boolean(const std::string& k, bool def) {
        if (!has(k)) return def;
        const json& v = raw(k);
        if (!v.is_boolean()) fail(at(k), "expected true or false");
        return v.get<bool>();
    }
    std::string text(const std::string& k, const std::string& def) {
        if (!has(k)) return def;
        const json& v = raw(k);
        if (!v.is_string()) fail(at(k), "expected a string");
        return v.get<std::string>();
    }
    MatrixXd matrix(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_array() || v.empty()) fail(at(k), "expected a non-empty array of rows");
        const Index r = Index(v.size());
        MatrixXd m(r, r);
        for (Index i = 0; i < r; ++i) {
            const json& row = v[std::size_t(i)];
            if (!row.is_array() || Index(row.size()) != r) fail(at(k), "expected a square matrix");
            for (Index c = 0; c < r; ++c) {
                if (!row[std::size_t(c)].is_number()) fail(at(k), "matrix entries must be numbers");
                m(i, c) = row[std::size_t(c)].get<double>();
            }
        }
        return m;
    }
    Fields object(const std::string& k) { return Fields(raw(k), at(k)); }

    std::string at(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) fail(at(it.key()), "unknown field");
    }

    [[noreturn]] static void fail(const std::string& where, const std::string& what) {
        throw SchemaError("schema violation at " + where + ": " + what);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

struct StepResult {
    ProbeOutcome outcome;
    std::vector<std::pair<std::string, double>> recorded;
};

json recorded_json(const std::vector<std::pair<std::string, double>>& rec) {
    json j = json::object();
    for (const auto& [k, v] : rec) j[k] = r12(v);
    return j;
}

std::vector<double> uniform(double t_end, int count) {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) t[std::size_t(i)] = t_end * double(i) / double(count - 1);
    return t;
}

struct Context {
    Scenario sc;
    HyperbolicSystem sys;
    fs::path out;
    std::optional<Symmetrizer> S;
    std::optional<double> mu;
    std::optional<Trajectory> traj;
    std::optional<LossReport> loss;
    std::vector<ProbeOutcome> order_outcomes;
    std::ostream* log = nullptr;

    SampleSet samples() const {
        SampleSet s;
        if (sys.t_dependent) s.times = uniform(sc.solver.t_end, 17);
        return s;
    }
    const Symmetrizer& symmetrizer() {
        if (!S) S = build_symmetrizer(sys, samples());
        return *S;
    }
    const Trajectory& trajectory() {
        if (!traj) {
            SolverConfig cfg = sc.solver;
            cfg.t_end = sc.schedule.T_star;
            traj = evolve(sys, initial_data(sc), cfg);
        }
        return *traj;
    }
};

StepResult step_hyperbolic(Context& cx) {
    StepResult r;
    const HyperbolicityReport h = check_hyperbolic(cx.sys, cx.samples());
    r.outcome.checks.push_back(make_check("max_imag_over_norm", h.max_imag, "<=", 1e-9));
    r.outcome.detail["min_gap"] = r12(h.min_gap);
    return r;
}

StepResult step_symmetrizer(Context& cx) {
    StepResult r;
    const Symmetrizer& S = cx.symmetrizer();
    const SymmetrizerReport rep = verify_symmetrizer(S, cx.sys, cx.samples());
    r.outcome.checks.push_back(make_check("hermitian_residual", rep.hermitian_residual, "<=", cx.sc.residual_tol));
    r.outcome.checks.push_back(make_check("positivity_residual", rep.positivity_residual, "<=", cx.sc.residual_tol));
    r.outcome.checks.push_back(make_check("symmetrizing_residual", rep.symmetrizing_residual, "<=", cx.sc.residual_tol));
    r.outcome.checks.push_back(make_check("homogeneity_residual", rep.homogeneity_residual, "<=", cx.sc.residual_tol));
    r.recorded = {{"lambda", S.lambda}, {"Lambda", S.Lambda}, {"ll_x", rep.ll_x}, {"ll_t", rep.ll_t}};
    return r;
}

StepResult step_calibrate(Context& cx) {
    StepResult r;
    const CalibrationResult cal = calibrate_mu(cx.symmetrizer(), calibration_corpus(cx.sys.n, cx.sys.m, cx.sc.seed));
    r.outcome.checks.push_back(make_check("calibration_succeeded", cal.ok ? 1.0 : 0.0, ">=", 1.0));
    r.outcome.checks.push_back(make_check("mu", cal.ok ? cal.mu : kInf, "<=", cx.sc.mu_max));
    r.outcome.detail["threshold"] = r12(cal.threshold);
    r.recorded = {{"mu", cal.mu}, {"C_mu", cal.C_mu}, {"C0", cal.C0}};
    if (cal.ok) cx.mu = cal.mu;
    return r;
}

StepResult step_energy(Context& cx) {
    StepResult r;
    EnergySchedule sched = cx.sc.schedule;
    if (cx.sc.mu_calibrate) {
        if (!cx.mu) {
            const CalibrationResult cal =
                calibrate_mu(cx.symmetrizer(), calibration_corpus(cx.sys.n, cx.sys.m, cx.sc.seed));
            if (!cal.ok) throw std::runtime_error("no mu <= 1024 passes calibration");
            cx.mu = cal.mu;
        }
        sched.mu = *cx.mu;
    }
    const Trajectory& run = cx.trajectory();
    const EnergyFunctional ef(cx.symmetrizer(), sched.mu, sched.T_star);
    const EnergyDerivativeReport d = energy_derivative_probe(run, ef, sched);
    const GronwallReport g = gronwall_check(run, sched, cx.sc.gronwall_C1, cx.sc.gronwall_C2);
    const double margin = cx.sc.gronwall_refined ? g.margin_refined : g.margin;
    r.outcome.checks.push_back(
        make_check(cx.sc.gronwall_refined ? "gronwall_refined_margin" : "gronwall_margin", margin, ">=", -1e-12));
    r.outcome.detail["mu"] = r12(sched.mu);
    r.outcome.detail["C1"] = r12(cx.sc.gronwall_C1);
    r.outcome.detail["C2"] = r12(cx.sc.gronwall_C2);
    r.outcome.detail["worst_time"] = r12(g.worst_time);
    r.recorded = {{"dE_over_E", d.C1}, {"dE_over_E_log", d.C23}, {"margin", margin}};
    write_energy_csv((cx.out / "energy.csv").string(), run, ef, sched, g);
    return r;
}

StepResult step_conservation(Context& cx) {
    StepResult r;
    const Trajectory& run = cx.trajectory();
    const double n0 = l2_norm(run.states.front());
    double drift = 0.0;
    for (const auto& s : run.states) drift = std::max(drift, std::abs(l2_norm(s) - n0) / n0);
    r.outcome.checks.push_back(make_check("l2_drift", drift, "<=", cx.sc.conservation_tol));
    r.outcome.detail["records"] = run.size();
    return r;
}

StepResult step_loss(Context& cx) {
    StepResult r;
    cx.loss = loss_experiment(cx.sys, cx.sc.loss, cx.sc.solver);
    const LossReport& rep = *cx.loss;
    if (cx.sc.beta_hat_max)
        r.outcome.checks.push_back(make_check("beta_hat", rep.beta_hat, "<=", *cx.sc.beta_hat_max));
    if (cx.sc.beta_hat_min) {
        r.outcome.checks.push_back(make_check("beta_hat", rep.beta_hat, ">=", *cx.sc.beta_hat_min));
        r.outcome.checks.push_back(make_check("min_corr", rep.min_corr, ">=", cx.sc.min_corr));
    }
    r.outcome.checks.push_back(make_check("beta_hat_finite", std::isfinite(rep.beta_hat) ? 1.0 : 0.0, ">=", 1.0));
    if (cx.sc.beta_fit) {
        cx.sc.schedule.beta = cx.sc.beta_factor * std::max(rep.beta_hat, 0.0);
        r.outcome.checks.push_back(
            make_check("lifespan_beta_T_over_s", cx.sc.schedule.beta * cx.sc.schedule.T_star / cx.sc.schedule.s, "<=", 1.0));
    }
    json rates = json::array();
    for (const auto& f : rep.fits) rates.push_back({{"j", f.j}, {"rate", r12(f.rate)}, {"corr", r12(f.corr)}});
    r.outcome.detail["rates"] = rates;
    r.recorded = {{"beta_hat", rep.beta_hat}, {"beta_hat_all", rep.beta_hat_all}, {"min_corr", rep.min_corr}};
    write_loss_csv((cx.out / "loss.csv").string(), rep);
    return r;
}

StepResult step_gronwall(Context& cx) {
    StepResult r;
    if (!cx.loss) throw SchemaError("schema violation at steps: gronwall needs a preceding loss step");
    const LossReport& rep = *cx.loss;
    const double s = cx.sc.loss.s, beta = cx.sc.beta_factor * rep.beta_hat;
    const std::size_t half = rep.runs.size() / 2;
    const GronwallFit fit = fit_gronwall(rep, s, beta);
    const GronwallFit lo = fit_gronwall(rep, s, beta, 0, half), hi = fit_gronwall(rep, s, beta, half);
    const GronwallFit lo0 = fit_gronwall(rep, s, 0.0, 0, half), hi0 = fit_gronwall(rep, s, 0.0, half);
    // fit and sweep must agree on the same packets; the transfer from low to high packets is a diagnostic
    const GronwallSweep sweep = gronwall_sweep(rep, s, beta, fit);
    GronwallFit transfer = lo;
    transfer.C1 *= 1.1;
    const GronwallSweep moved = gronwall_sweep(rep, s, beta, transfer);
    r.outcome.checks.push_back(make_check("refined_margin", sweep.margin, ">=", -1e-12));
    r.outcome.checks.push_back(make_check("margin_from_low_packets", moved.margin, ">=", -1e-12, false));
    r.outcome.checks.push_back(make_check("rate_uniform_in_frequency", hi.C2 - lo.C2, "<=", 0.05));
    r.outcome.checks.push_back(make_check("no_shift_rate_grows_with_frequency", hi0.C2 - lo0.C2, ">", 0.05, false));
    r.outcome.detail["beta"] = r12(beta);
    r.recorded = {{"C1", fit.C1}, {"C2", fit.C2}};
    return r;
}

StepResult step_commutator(Context& cx) {
    StepResult r;
    const CommutatorReport c = commutator_probe(cx.sys, initial_data(cx.sc), 0.0);
    r.outcome.checks.push_back(make_check("decay_ratio", c.ratio, "<=", cx.sc.commutator_ratio));
    r.outcome.checks.push_back(make_check("monotone", c.monotone ? 1.0 : 0.0, ">=", 1.0));
    r.recorded = {{"rate", c.rate}};
    return r;
}

StepResult run_step(Context& cx, const std::string& name) {
    static const std::map<std::string, StepResult (*)(Context&)> table = {
        {"hyperbolic", step_hyperbolic}, {"symmetrizer", step_symmetrizer}, {"calibrate", step_calibrate},
        {"energy", step_energy},         {"conservation", step_conservation}, {"loss", step_loss},
        {"gronwall", step_gronwall},     {"commutator", step_commutator}};
    const auto it = table.find(name);
    if (it != table.end()) {
        StepResult r = it->second(cx);
        r.outcome.name = name;
        return r;
    }
    StepResult r;
    r.outcome = run_probe(name, cx.sc.seed);
    if (name.rfind("order:", 0) == 0) cx.order_outcomes.push_back(r.outcome);
    return r;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": malformed JSON at " + line_col(text, e.byte));
    }
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << s;
}

}  // namespace

std::optional<std::uint64_t> seed_override() {
    const char* v = std::getenv("PARACALC_SEED");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const unsigned long long s = std::strtoull(v, &end, 10);
    if (*end != '\0' || v[0] == '-') throw SchemaError("PARACALC_SEED must be a non-negative integer");
    return std::uint64_t(s);
}

Scenario parse_scenario(const std::string& text, const std::string& path) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": malformed JSON at " + line_col(text, e.byte));
    }
    Scenario sc;
    sc.path = path;
    Fields top(j, "");
    if (!top.has("schema_version")) Fields::fail("schema_version", "required field is missing");
    if (top.integer("schema_version", 0) != kSchemaVersion)
        Fields::fail("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
    sc.name = top.text("name", "");
    if (sc.name.empty()) Fields::fail("name", "required non-empty string");
    const long seed = top.integer("seed", 0);
    if (seed < 0) Fields::fail("seed", "must be non-negative");
    sc.seed = std::uint64_t(seed);

    if (!top.has("system")) Fields::fail("system", "required field is missing");
    {
        Fields f = top.object("system");
        SystemSpec& s = sc.system;
        s.preset = f.text("preset", "constant");
        if (std::find(presets().begin(), presets().end(), s.preset) == presets().end())
            Fields::fail(f.at("preset"), "unknown preset '" + s.preset + "'");
        s.n = Index(f.integer("n", 256));
        if (!valid_grid_size(s.n)) Fields::fail(f.at("n"), "grid size must be a power of two >= 16");
        s.m = Index(f.integer("m", 1));
        if (s.m < 1) Fields::fail(f.at("m"), "must be positive");
        if (f.has("a0")) {
            s.a0 = f.matrix("a0");
            if (s.a0.rows() != s.m) Fields::fail(f.at("a0"), "size must equal m");
        }
        s.amp = f.number("amp", 0.0);
        const long ss = f.integer("seed", seed);
        if (ss < 0) Fields::fail(f.at("seed"), "must be non-negative");
        s.seed = std::uint64_t(ss);
        s.terms = int(f.integer("terms", 6));
        if (s.terms < 1) Fields::fail(f.at("terms"), "must be positive");
        s.holder_gamma = f.number("holder_gamma", 0.0);
        s.b_amp = f.number("b_amp", 0.0);
        if (f.has("b0")) {
            s.b0 = f.matrix("b0");
            if (s.b0.rows() != s.m) Fields::fail(f.at("b0"), "size must equal m");
        }
        const std::string kind = f.text("kind", "non_conservative");
        if (kind == "non_conservative") s.kind = OperatorKind::NonConservative;
        else if (kind == "conservative") s.kind = OperatorKind::Conservative;
        else Fields::fail(f.at("kind"), "expected non_conservative or conservative");
        f.finish();
    }
    if (top.has("solver")) {
        Fields f = top.object("solver");
        sc.solver.cfl = f.number("cfl", 0.4);
        sc.solver.dt = f.number("dt", 0.0);
        sc.solver.t_end = f.number("t_end", 1.0);
        sc.solver.dealias = f.boolean("dealias", true);
        sc.solver.record_stride = int(f.integer("record_stride", 1));
        if (!(sc.solver.cfl > 0.0)) Fields::fail(f.at("cfl"), "must be positive");
        if (sc.solver.dt < 0.0) Fields::fail(f.at("dt"), "must be non-negative");
        if (!(sc.solver.t_end > 0.0)) Fields::fail(f.at("t_end"), "must be positive");
        if (sc.solver.record_stride < 1) Fields::fail(f.at("record_stride"), "must be positive");
        f.finish();
    }
    sc.schedule.T_star = sc.solver.t_end;
    sc.schedule.kind = sc.system.kind;
    if (top.has("schedule")) {
        Fields f = top.object("schedule");
        sc.schedule.s = f.number("s", 0.5);
        if (f.has("beta") && f.raw("beta").is_string()) {
            if (f.raw("beta").get<std::string>() != "fit") Fields::fail(f.at("beta"), "expected a number or \"fit\"");
            sc.beta_fit = true;
            sc.schedule.beta = 0.0;
        } else {
            sc.schedule.beta = f.number("beta", 0.0);
        }
        sc.schedule.T_star = f.number("T_star", sc.solver.t_end);
        if (f.has("mu") && f.raw("mu").is_string()) {
            if (f.raw("mu").get<std::string>() != "calibrate") Fields::fail(f.at("mu"), "expected a number or \"calibrate\"");
            sc.mu_calibrate = true;
        } else {
            sc.schedule.mu = f.number("mu", 2.0);
        }
        sc.beta_factor = f.number("beta_factor", 1.2);
        sc.schedule.gamma = f.number("gamma", 1.0);
        f.finish();
        try {
            sc.schedule.validate();
        } catch (const std::invalid_argument& e) {
            Fields::fail("schedule", e.what());
        }
    }
    if (top.has("initial")) {
        const json& a = top.raw("initial");
        if (!a.is_array()) Fields::fail("initial", "expected an array of modes");
        for (std::size_t i = 0; i < a.size(); ++i) {
            Fields f(a[i], "initial[" + std::to_string(i) + "]");
            InitialMode m;
            m.k = f.integer("k", 1);
            m.amp = f.number("amp", 1.0);
            m.phase = f.number("phase", 0.0);
            m.component = Index(f.integer("component", 0));
            if (m.component < 0 || m.component >= sc.system.m) Fields::fail(f.at("component"), "outside 0..m-1");
            if (std::abs(m.k) >= sc.system.n / 2) Fields::fail(f.at("k"), "not resolved on the grid");
            f.finish();
            sc.initial.push_back(m);
        }
    } else {
        sc.initial.push_back(InitialMode{});
    }
    if (top.has("loss")) {
        Fields f = top.object("loss");
        LossConfig& l = sc.loss;
        l.j_lo = int(f.integer("j_lo", 3));
        l.j_hi = int(f.integer("j_hi", 8));
        l.s = f.number("s", 0.9);
        l.fit_from = f.number("fit_from", 0.2);
        l.top_fraction = f.number("top_fraction", 0.5);
        l.records = int(f.integer("records", 192));
        if (f.has("beta_hat_min")) sc.beta_hat_min = f.number("beta_hat_min", 0.0);
        if (f.has("beta_hat_max")) sc.beta_hat_max = f.number("beta_hat_max", 0.0);
        sc.min_corr = f.number("min_corr", 0.9);
        if (l.j_lo < 1 || l.j_hi <= l.j_lo) Fields::fail(f.at("j_hi"), "need 1 <= j_lo < j_hi");
        if (std::ldexp(1.0, l.j_hi) > double(sc.system.n) / 3.0)
            Fields::fail(f.at("j_hi"), "packet 2^j_hi exceeds the dealiased range N/3");
        f.finish();
    }
    if (top.has("gronwall")) {
        Fields f = top.object("gronwall");
        sc.gronwall_C1 = f.number("C1", 1.01);
        sc.gronwall_C2 = f.number("C2", 0.0);
        const std::string form = f.text("form", "plain");
        if (form != "plain" && form != "refined") Fields::fail(f.at("form"), "expected plain or refined");
        sc.gronwall_refined = form == "refined";
        f.finish();
    }
    if (top.has("checks")) {
        Fields f = top.object("checks");
        sc.conservation_tol = f.number("conservation_tol", sc.conservation_tol);
        sc.residual_tol = f.number("residual_tol", sc.residual_tol);
        sc.mu_max = f.number("mu_max", sc.mu_max);
        sc.commutator_ratio = f.number("commutator_ratio", sc.commutator_ratio);
        f.finish();
    }
    if (top.has("steps")) {
        const json& a = top.raw("steps");
        if (!a.is_array()) Fields::fail("steps", "expected an array of step names");
        const auto& reg = probe_names();
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_string()) Fields::fail("steps[" + std::to_string(i) + "]", "expected a string");
            const std::string s = a[i].get<std::string>();
            if (std::find(scenario_steps().begin(), scenario_steps().end(), s) == scenario_steps().end() &&
                std::find(reg.begin(), reg.end(), s) == reg.end())
                Fields::fail("steps[" + std::to_string(i) + "]", "unknown step '" + s + "'");
            if (s == "gronwall" && std::find(sc.steps.begin(), sc.steps.end(), "loss") == sc.steps.end())
                Fields::fail("steps[" + std::to_string(i) + "]", "gronwall needs a preceding loss step");
            sc.steps.push_back(s);
        }
    }
    top.finish();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read scenario " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

std::string baseline_path(const std::string& scenario_path) {
    fs::path p(scenario_path);
    return (p.parent_path() / (p.stem().string() + ".baseline.json")).string();
}

GridFunction initial_data(const Scenario& sc) {
    const Index n = sc.system.n;
    GridFunction u(n, sc.system.m);
    const VectorXd x = grid_points(n);
    for (const auto& m : sc.initial)
        for (Index i = 0; i < n; ++i) u.values(i, m.component) += m.amp * std::cos(double(m.k) * x(i) + m.phase);
    return u;
}

void write_order_csv(const std::string& path, const std::vector<ProbeOutcome>& outcomes) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "probe,s,alpha,j,log2_ratio\n";
    for (const auto& o : outcomes)
        for (auto it = o.detail.begin(); it != o.detail.end(); ++it) {
            if (!it->is_array()) continue;
            for (const auto& row : *it) {
                if (!row.is_object() || !row.contains("scales") || !row.contains("log2_ratios")) continue;
                const auto& js = row["scales"];
                const auto& lr = row["log2_ratios"];
                for (std::size_t i = 0; i < js.size() && i < lr.size(); ++i) {
                    if (!lr[i].is_number()) continue;
                    out << it.key() << ',' << row["s"].get<double>() << ',' << row["alpha"].get<double>() << ','
                        << js[i].get<int>() << ',' << lr[i].get<double>() << '\n';
                }
            }
        }
}

json run_probe_suite(const std::vector<std::string>& names, std::uint64_t seed, bool& pass) {
    std::vector<std::string> sel;
    for (const auto& n : names) {
        if (n == "all") sel.insert(sel.end(), probe_names().begin(), probe_names().end());
        else if (!n.empty()) sel.push_back(n);
    }
    json report;
    report["schema_version"] = kSchemaVersion;
    report["seed"] = seed;
    report["probes"] = json::array();
    pass = true;
    for (const auto& n : sel) {
        const ProbeOutcome o = run_probe(n, seed);
        pass = pass && o.pass();
        report["probes"].push_back(to_json(o));
    }
    report["pass"] = pass;
    return report;
}

RunResult run_scenario(const std::string& path, const RunOptions& opt, std::ostream& log) {
    RunResult res;
    Context cx;
    cx.log = &log;
    try {
        cx.sc = load_scenario(path);
        if (const auto s = seed_override()) {
            log << "PARACALC_SEED=" << *s << " overrides scenario seed " << cx.sc.seed << " and system seed "
                << cx.sc.system.seed << "\n";
            cx.sc.seed = *s;
            cx.sc.system.seed = *s;
        }
    } catch (const SchemaError& e) {
        res.exit_code = 2;
        res.message = e.what();
        return res;
    }

    const Scenario& sc = cx.sc;
    cx.out = opt.out_dir.empty() ? fs::path("out") / sc.name : fs::path(opt.out_dir);
    fs::create_directories(cx.out / "plots");

    const std::string bpath = baseline_path(path);
    json baseline;
    const bool have_baseline = !opt.rebaseline && fs::exists(bpath);
    if (have_baseline) {
        try {
            baseline = read_json_file(bpath);
        } catch (const SchemaError& e) {
            res.exit_code = 2;
            res.message = e.what();
            return res;
        }
        if (!baseline.contains("values") || !baseline["values"].is_object()) {
            res.exit_code = 2;
            res.message = bpath + ": schema violation at values: expected an object";
            return res;
        }
    }
    const bool baseline_applies = have_baseline && baseline.value("seed", std::uint64_t(0)) == sc.seed;
    if (have_baseline && !baseline_applies) log << "baseline recorded for another seed; baseline checks skipped\n";

    json report;
    report["schema_version"] = kSchemaVersion;
    report["scenario"] = sc.name;
    report["seed"] = sc.seed;
    report["system"] = sc.system.preset;
    report["n"] = sc.system.n;
    report["steps"] = json::array();
    json new_baseline;
    new_baseline["schema_version"] = kSchemaVersion;
    new_baseline["scenario"] = sc.name;
    new_baseline["seed"] = sc.seed;
    new_baseline["values"] = json::object();

    bool fixed_ok = true, all_ok = true;
    try {
        SystemSpec spec = sc.system;
        cx.sys = make_system(spec);
        for (const auto& name : sc.steps) {
            log << "step " << name << " ..." << std::flush;
            StepResult r = run_step(cx, name);
            for (const auto& c : r.outcome.checks)
                if (c.gated && !c.pass) fixed_ok = false;
            for (const auto& [k, v] : r.recorded) {
                const std::string key = name + "." + k;
                new_baseline["values"][key] = {{"value", r12(v)}, {"rel_tol", 1e-6}};
                if (!baseline_applies || !baseline["values"].contains(key)) continue;
                const json& b = baseline["values"][key];
                const double bv = b.value("value", 0.0), tol = b.value("rel_tol", 1e-6);
                const double dev = std::abs(v - bv) / std::max(std::abs(bv), 1e-300);
                r.outcome.checks.push_back(
                    make_check("baseline:" + k, bv == 0.0 ? std::abs(v) : dev, "<=", bv == 0.0 ? 1e-12 : tol, true,
                               "baseline:" + fs::path(bpath).filename().string()));
            }
            const bool ok = r.outcome.pass();
            all_ok = all_ok && ok;
            log << (ok ? " pass" : " FAIL") << "\n";
            json j = to_json(r.outcome);
            j["recorded"] = recorded_json(r.recorded);
            report["steps"].push_back(j);
        }
    } catch (const NumericalGuardError& e) {
        res.exit_code = 3;
        res.message = std::string("numerical guard: ") + e.what();
        report["error"] = res.message;
        report["pass"] = false;
        write_text(cx.out / "report.json", report.dump(2) + "\n");
        res.report = report;
        return res;
    } catch (const SchemaError& e) {
        res.exit_code = 2;
        res.message = e.what();
        return res;
    } catch (const std::invalid_argument& e) {
        res.exit_code = 2;
        res.message = std::string("schema violation: ") + e.what();
        return res;
    }

    report["pass"] = all_ok;
    write_text(cx.out / "report.json", report.dump(2) + "\n");
    if (fs::exists(cx.out / "energy.csv"))
        write_text(cx.out / "plots" / "energy.svg", plot_csv((cx.out / "energy.csv").string(), "energy"));
    if (fs::exists(cx.out / "loss.csv"))
        write_text(cx.out / "plots" / "loss.svg", plot_csv((cx.out / "loss.csv").string(), "loss"));
    if (!cx.order_outcomes.empty()) {
        write_order_csv((cx.out / "order.csv").string(), cx.order_outcomes);
        write_text(cx.out / "plots" / "order.svg", plot_csv((cx.out / "order.csv").string(), "order"));
    }
    res.report = report;

    if (opt.rebaseline) {
        if (!fixed_ok) {
            res.exit_code = 1;
            res.message = "refusing to rebaseline: a fixed check failed";
            return res;
        }
        write_text(bpath, new_baseline.dump(2) + "\n");
        log << "baseline written to " << bpath << "\n";
    }
    res.exit_code = all_ok ? 0 : 1;
    if (!all_ok) res.message = "one or more gated checks failed";
    return res;
}

}  // namespace paracalc
