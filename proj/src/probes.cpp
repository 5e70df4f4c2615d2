#include "paracalc/probes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "paracalc/dyadic.hpp"
#include "paracalc/energy.hpp"
#include "paracalc/paradiff.hpp"
#include "paracalc/rng.hpp"
#include "paracalc/solver.hpp"
#include "paracalc/systems.hpp"

namespace paracalc {

using json = nlohmann::ordered_json;

ProbeCheck make_check(const std::string& name, double value, const std::string& relation, double tol, bool gated,
                      const std::string& provenance) {
    ProbeCheck c;
    c.name = name;
    c.value = value;
    c.tol = tol;
    c.relation = relation;
    c.gated = gated;
    c.provenance = provenance;
    if (relation == "<=")
        c.pass = value <= tol;
    else if (relation == ">=")
        c.pass = value >= tol;
    else if (relation == ">")
        c.pass = value > tol;
    else if (relation == "abs<=")
        c.pass = std::abs(value) <= tol;
    else
        throw std::invalid_argument("unknown relation " + relation);
    if (std::isnan(value)) c.pass = false;
    return c;
}

bool ProbeOutcome::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ProbeCheck& c) { return !c.gated || c.pass; });
}

double r12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

json to_json(const ProbeCheck& c) {
    json j;
    j["name"] = c.name;
    j["value"] = r12(c.value);
    j["relation"] = c.relation;
    j["tol"] = r12(c.tol);
    j["gated"] = c.gated;
    j["provenance"] = c.provenance;
    j["pass"] = c.pass;
    return j;
}

json to_json(const ProbeOutcome& o) {
    json j;
    j["name"] = o.name;
    j["pass"] = o.pass();
    j["checks"] = json::array();
    for (const auto& c : o.checks) j["checks"].push_back(to_json(c));
    j["detail"] = o.detail;
    return j;
}

namespace {

json slopes_json(const std::vector<OperatorProbeReport>& reps) {
    json a = json::array();
    for (const auto& r : reps) {
        json j;
        j["name"] = r.name;
        j["s"] = r12(r.s);
        j["alpha"] = r12(r.alpha);
        j["claimed"] = {r12(r.claimed_m), r12(r.claimed_delta)};
        j["slope"] = r12(r.fitted_slope);
        j["tol"] = r12(r.tol);
        j["verdict"] = r.verdict;
        j["vanishes"] = r.vanishes;
        j["gated"] = r.gated;
        if (!r.note.empty()) j["note"] = r.note;
        j["scales"] = r.scales;
        j["log2_ratios"] = json::array();
        for (double q : r.ratios) j["log2_ratios"].push_back(r12(std::log2(q)));
        a.push_back(j);
    }
    return a;
}

// Summary line for a suite: the worst slope, passing when every gated (s, alpha) report passes.
void add_suite(ProbeOutcome& out, const std::string& key, const std::vector<OperatorProbeReport>& reps,
               bool gated = true, const std::string& relation = "abs<=") {
    const OperatorProbeReport w = worst_of(reps);
    bool all = true;
    for (const auto& r : reps) all = all && (r.verdict || !r.gated);
    ProbeCheck c = make_check(key + ".worst_slope", w.fitted_slope, relation, w.tol, gated);
    c.pass = all;
    out.checks.push_back(c);
    out.detail[key] = slopes_json(reps);
}

GridFunction random_field(Index n, Index m, std::uint64_t seed, double decay) {
    SplitMix rng(seed);
    SpectralCoeffs c;
    c.coeffs.resize(n, m);
    for (Index comp = 0; comp < m; ++comp)
        for (Index i = 0; i < n; ++i) {
            const double re = rng.normal(), im = rng.normal();
            c.coeffs(i, comp) = cplx(re, im) / std::pow(1.0 + std::abs(double(freq(i, n))), decay);
        }
    return from_spectral(c);
}

double inner(const GridFunction& a, const GridFunction& b) {
    return std::abs((a.values.adjoint() * b.values).trace()) * kTwoPi / double(a.size());
}

cplx ik(double xi) { return cplx(0.0, xi); }
cplx one(double) { return cplx(1.0, 0.0); }

// ---- dyadic exactness -------------------------------------------------------------------

ProbeOutcome probe_dyadic(std::uint64_t seed) {
    ProbeOutcome out;
    const Index n = 1024;
    double recon = 0.0, ortho = 0.0, lo = kInf, hi = 0.0, b_lo = kInf, b_hi = 0.0;
    for (int f = 0; f < 100; ++f) {
        const GridFunction u = random_field(n, 1, derive_seed(seed, 7, std::uint64_t(f)), 0.75);
        const std::vector<GridFunction> blocks = dyadic_blocks(u);
        GridFunction sum(n, 1);
        double energy = 0.0;
        for (const auto& b : blocks) {
            sum += b;
            energy += l2_norm(b) * l2_norm(b);
        }
        recon = std::max(recon, max_abs_diff(sum, u) / sup_norm(u));
        const double nu = l2_norm(u);
        lo = std::min(lo, energy / (nu * nu));
        hi = std::max(hi, energy / (nu * nu));
        for (std::size_t j = 0; j < blocks.size(); ++j)
            for (std::size_t k = j + 2; k < blocks.size(); ++k)
                ortho = std::max(ortho, inner(blocks[j], blocks[k]) / (l2_norm(blocks[j]) * l2_norm(blocks[k])));
        for (int j = 1; j + 1 < int(blocks.size()); ++j) {
            const double r = bernstein_ratio(u, j, 1);
            b_lo = std::min(b_lo, r);
            b_hi = std::max(b_hi, r);
        }
    }
    out.checks.push_back(make_check("reconstruction_rel_error", recon, "<=", 1e-12));
    out.checks.push_back(make_check("orthogonality_beyond_neighbours", ortho, "<=", 1e-12));
    out.checks.push_back(make_check("block_energy_min", lo, ">=", 0.5));
    out.checks.push_back(make_check("block_energy_max", hi, "<=", 1.0 + 1e-12));
    out.checks.push_back(make_check("bernstein_min", b_lo, ">=", 0.5));
    out.checks.push_back(make_check("bernstein_max", b_hi, "<=", 2.0));
    out.detail["fields"] = 100;
    out.detail["n"] = n;
    return out;
}

// ---- norms and products -------------------------------------------------------------------

ProbeOutcome probe_norms(std::uint64_t seed) {
    ProbeOutcome out;
    const Index n = 1024;
    double lo = kInf, hi = 0.0;
    for (int f = 0; f < 40; ++f) {
        const GridFunction u = random_field(n, 1, derive_seed(seed, 11, std::uint64_t(f)), 0.5 + 0.05 * (f % 10));
        for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0})
            for (double a : {0.0, 0.5, 1.0}) {
                const SobolevIndex idx(s, a);
                const double r = log_sobolev_norm(u, idx) / dyadic_sobolev_norm(u, idx);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
    }
    out.checks.push_back(make_check("direct_over_dyadic_bracket", hi / lo, "<=", 4.0));
    out.detail["ratio_min"] = r12(lo);
    out.detail["ratio_max"] = r12(hi);

    // Boundedness region of u -> a u; the convergent tail near |s| = gamma needs a long dyadic range.
    const Index np = 8192;
    const int scale = j_max_for(np) - 1;
    const GridFunction h = gen_holder_function(np, 0.6, 2 + seed, scale);
    const GridFunction l = gen_ll_function(np, 2 + seed, scale);
    json table = json::array();
    auto region = [&](const GridFunction& a, CoefficientClass cls, const std::string& tag, double s, bool bounded) {
        const ProductProbeTable t = product_probe(a, cls, SobolevIndex(s), scale, 5 + seed);
        char key[64];
        std::snprintf(key, sizeof key, "%s_s%+.1f_%s", tag.c_str(), s, bounded ? "bounded" : "growth");
        out.checks.push_back(make_check(key, t.last_octave_slope, bounded ? "<=" : ">", 0.05));
        table.push_back({{"class", tag}, {"s", r12(s)}, {"slope", r12(t.last_octave_slope)}, {"bounded", t.bounded}});
    };
    for (double s : {-0.5, 0.0, 0.5}) region(h, CoefficientClass::Holder, "holder", s, true);
    for (double s : {-0.8, 0.8}) region(h, CoefficientClass::Holder, "holder", s, false);
    for (double s : {-0.9, 0.0, 0.9}) region(l, CoefficientClass::LogLipschitz, "ll", s, true);
    for (double s : {-1.2, 1.2}) region(l, CoefficientClass::LogLipschitz, "ll", s, false);
    out.detail["products"] = table;
    out.detail["product_grid"] = np;
    return out;
}

// ---- mollifier laws -------------------------------------------------------------------------

ProbeOutcome probe_mollifier(std::uint64_t seed) {
    ProbeOutcome out;
    double worst_c = 0.0, worst_d = 0.0;
    json rows = json::array();
    for (int q = 0; q < 10; ++q) {
        const TimePath g = gen_ll_time_coefficient(10 * seed + std::uint64_t(q), 12, 16385, 1.0);
        std::vector<double> cs, ds;
        for (int k = 4; k <= 10; ++k) {
            const double eps = std::ldexp(1.0, -k), lg = std::log(1.0 + 1.0 / eps);
            double c = 0.0, d = 0.0;
            for (Index l = 4096; l <= 12288; l += 8) {
                const KernelWeights kw = kernel_weights(g.time(l), eps, g.samples(), g.dt());
                double v = 0.0, dv = 0.0;
                for (std::size_t i = 0; i < kw.index.size(); ++i) {
                    v += kw.value[i] * g.values(kw.index[i]);
                    dv += kw.deriv[i] * g.values(kw.index[i]);
                }
                c = std::max(c, std::abs(v - g.values(l)) / (eps * lg));
                d = std::max(d, std::abs(dv) / lg);
            }
            cs.push_back(c);
            ds.push_back(d);
        }
        const double rc = *std::max_element(cs.begin(), cs.end()) / *std::min_element(cs.begin(), cs.end());
        const double rd = *std::max_element(ds.begin(), ds.end()) / *std::min_element(ds.begin(), ds.end());
        worst_c = std::max(worst_c, rc);
        worst_d = std::max(worst_d, rd);
        rows.push_back({{"seed_index", q}, {"C", json(std::vector<double>())}, {"C_spread", r12(rc)}, {"D_spread", r12(rd)}});
        for (double c : cs) rows.back()["C"].push_back(r12(c));
    }
    out.checks.push_back(make_check("approximation_constant_spread", worst_c, "<=", 3.0));
    out.checks.push_back(make_check("derivative_constant_spread", worst_d, "<=", 3.0));
    out.detail["per_seed"] = rows;
    return out;
}

// ---- operator orders -------------------------------------------------------------------------

struct OrderSetup {
    Index n = 1024;
    DyadicPartition part{1024};
    AdmissibleCutoff psi;
    GridFunction c;
    int jm = 0;
    ProbeOptions opt;

    explicit OrderSetup(std::uint64_t seed) {
        psi = make_psi_minus3(part);
        c = probe_ll_coefficient(n, 1 + seed);
        jm = part.j_max;
        opt.n = n;
        opt.seed = seed;
    }
    Symbol first_order() const { return smooth_symbol(scalar_symbol(c, ik, 1.0, 0.0), psi); }
};

ProbeOutcome probe_order_paraproduct(std::uint64_t seed) {
    OrderSetup st(seed);
    ProbeOutcome out;
    const GridFunction a = st.c;
    const LinearOperator P = [a](const GridFunction& u) { return paraproduct(a, u); };
    auto reps = operator_order_suite(P, 0.0, 0.0, default_probe_indices(), st.opt);
    for (auto& r : reps) r.name = "paraproduct";
    add_suite(out, "paraproduct", reps);
    return out;
}

ProbeOutcome probe_order_action(std::uint64_t seed) {
    OrderSetup st(seed);
    ProbeOutcome out;
    ProbeOptions o = st.opt;
    o.tol = 0.1;
    add_suite(out, "action", action_probe(st.first_order(), o));
    return out;
}

ProbeOutcome probe_order_cutoff(std::uint64_t seed) {
    OrderSetup st(seed);
    ProbeOutcome out;
    ProbeOptions o = st.opt;
    o.tol = 0.15;
    add_suite(out, "cutoff_independence",
              cutoff_independence_probe(scalar_symbol(st.c, ik, 1.0, 0.0), st.psi, make_cutoff(-4, st.part), o));
    return out;
}

ProbeOutcome probe_order_composition(std::uint64_t seed) {
    OrderSetup st(seed);
    ProbeOutcome out;
    ProbeOptions o = st.opt;
    o.tol = 0.2;
    const Index n = st.n;
    const Symbol dx = smooth_symbol(multiplier_symbol(n, ik, 1.0, 0.0), st.psi);
    const Symbol cx = smooth_symbol(scalar_symbol(st.c, one, 0.0, 0.0), st.psi);
    add_suite(out, "composition", composition_remainder_probe(dx, cx, o));
    add_suite(out, "composition_reversed", composition_remainder_probe(cx, dx, o));

    TimePath g = gen_ll_time_coefficient(3 + seed, st.jm + 1, 1025, 1.0);
    g.values.array() += 1.0;
    const Symbol gb = smooth_symbol(separable_symbol(g, st.c, one, 0.0, 0.0), st.psi);
    add_suite(out, "composition_tilde", composition_remainder_probe(dx, gb, o, true, 0.5));

    // Pairs whose remainder decays faster than the claimed order: the claim is an upper bound.
    ProbeOptions ub = o;
    ub.upper_bound = true;
    const GridFunction c2 = probe_ll_coefficient(n, 2 + seed);
    const Symbol c2s = smooth_symbol(scalar_symbol(c2, one, 0.0, 0.0), st.psi);
    add_suite(out, "composition_first_order_pair", composition_remainder_probe(st.first_order(), c2s, ub), false, "<=");
    add_suite(out, "composition_order_zero_pair", composition_remainder_probe(cx, c2s, ub), false, "<=");
    return out;
}

ProbeOutcome probe_order_adjoint(std::uint64_t seed) {
    OrderSetup st(seed);
    ProbeOutcome out;
    ProbeOptions o = st.opt;
    o.tol = 0.2;
    add_suite(out, "adjoint", adjoint_remainder_probe(st.first_order(), o));
    return out;
}

ProbeOutcome probe_order_paralin(std::uint64_t seed) {
    OrderSetup st(seed);
    ProbeOutcome out;
    ProbeOptions o = st.opt;
    o.tol = 0.1;
    o.j_lo = 2;
    o.j_hi = st.jm - 1;
    const GridFunction h = gen_holder_function(st.n, 0.6, 4 + seed, st.jm - 1);
    const std::vector<SobolevIndex> idx = {{0.5, 0}, {0.7, 0}, {0.9, 0}, {0.5, 1}, {0.7, 1}, {0.9, 1}};
    add_suite(out, "paralin_holder", paralin_probe(h, 0.6, 0.0, 1, idx, o), true, "<=");
    const GridFunction l = gen_ll_function(st.n, 4 + seed, st.jm - 1);
    add_suite(out, "paralin_ll", paralin_probe(l, 1.0, -1.0, 1, {{0.2, 0}, {0.5, 0}, {0.8, 0}}, o), false, "<=");
    return out;
}

ProbeOutcome probe_order_time_commutator(std::uint64_t seed) {
    OrderSetup st(seed);
    ProbeOutcome out;
    ProbeOptions o = st.opt;
    o.tol = 0.1;
    o.remainder_tol = 0.15;
    const TimePath pk = gen_ll_time_peaked(st.jm + 4, 16385, 1.0, 0.5);
    const Symbol a = smooth_symbol(separable_symbol(pk, st.c, ik, 1.0, 0.0), st.psi);
    const TimeCommutatorReport rep = time_commutator_probe(a, 0.5, o);
    out.checks.push_back(make_check("identity_residual", rep.identity_residual, "<=", 1e-6));
    add_suite(out, "time_commutator", rep.commutator_order);
    add_suite(out, "tilde_difference", rep.tilde_difference);
    return out;
}

// ---- symmetrizers and calibration ------------------------------------------------------------------

ProbeOutcome probe_symmetrizer(std::uint64_t seed) {
    ProbeOutcome out;
    const Index n = 256;
    double worst = 0.0, worst_sq = 0.0, mu_max = 0.0;
    bool all_ok = true;
    json rows = json::array();
    const std::vector<GridFunction> corpus = calibration_corpus(n, 2, 11 + seed);
    for (int q = 0; q < 10; ++q) {
        SystemSpec sp;
        sp.preset = "wave_ll_x";
        sp.n = n;
        sp.amp = 0.2;
        sp.seed = seed + std::uint64_t(q);
        sp.terms = j_max_for(n) - 2;
        const HyperbolicSystem sys = make_system(sp);
        const SampleSet samples;
        const Symmetrizer S = build_symmetrizer(sys, samples);
        const SymmetrizerReport r = verify_symmetrizer(S, sys, samples);
        const CalibrationResult cal = calibrate_mu(S, corpus);
        const EnergyFunctional ef(S, cal.mu);
        double sq = 0.0;
        for (double xi : {3.0, 17.0, 60.0, 100.0}) sq = std::max(sq, sigma_square_residual(ef.sigma(), S, cal.mu, 0.0, xi));
        worst = std::max(worst, r.max_residual());
        worst_sq = std::max(worst_sq, sq);
        mu_max = std::max(mu_max, cal.ok ? cal.mu : kInf);
        all_ok = all_ok && cal.ok;
        rows.push_back({{"residual", r12(r.max_residual())}, {"lambda", r12(S.lambda)}, {"Lambda", r12(S.Lambda)},
                        {"ll_x_S", r12(r.ll_x)}, {"ll_x_A", r12(sys.reg.ll_x)}, {"mu", r12(cal.mu)},
                        {"C_mu", r12(cal.C_mu)}, {"C0", r12(cal.C0)}});
    }
    out.checks.push_back(make_check("symmetrizer_residual", worst, "<=", 1e-10));
    out.checks.push_back(make_check("square_root_residual", worst_sq, "<=", 1e-12));
    out.checks.push_back(make_check("calibrated_mu_max", mu_max, "<=", 64.0));
    out.checks.push_back(make_check("calibration_succeeded", all_ok ? 1.0 : 0.0, ">=", 1.0));
    out.detail["systems"] = rows;
    return out;
}

// ---- evolution: no-loss control, loss, commutators --------------------------------------------------

HyperbolicSystem constant_symmetric(Index n) {
    SystemSpec c;
    c.preset = "constant";
    c.n = n;
    c.m = 2;
    c.a0 = MatrixXd(2, 2);
    c.a0 << 1.0, 0.5, 0.5, -1.0;
    return make_system(c);
}

ProbeOutcome probe_no_loss(std::uint64_t seed) {
    ProbeOutcome out;
    const Index n = 256;
    {
        const HyperbolicSystem sys = constant_symmetric(n);
        const GridFunction w = sample(n, [](double x) { return cplx(std::sin(x) + 0.5 * std::cos(3.0 * x)); });
        GridFunction u0(n, 2);
        u0.values.col(0) = w.values.col(0);
        u0.values.col(1) = cplx(0.3, 0.1) * w.values.col(0);
        SolverConfig cfg;
        cfg.t_end = 1.0;
        const Trajectory tr = evolve(sys, u0, cfg);
        double drift = 0.0;
        for (const auto& s : tr.states) drift = std::max(drift, std::abs(l2_norm(s) - l2_norm(u0)) / l2_norm(u0));
        out.checks.push_back(make_check("l2_conservation_drift", drift, "<=", 1e-8));
    }
    {
        SystemSpec c;
        c.preset = "constant";
        c.n = n;
        const HyperbolicSystem sys = make_system(c);
        SolverConfig cfg;
        cfg.t_end = 1.0;
        const Trajectory tr = evolve(sys, sample(n, [](double x) { return cplx(std::sin(x)); }), cfg);
        const GridFunction exact = sample(n, [](double x) { return cplx(std::sin(x - 1.0)); });
        out.checks.push_back(make_check("transport_max_error", max_abs_diff(tr.states.back(), exact), "<=", 1e-6));
    }
    {
        SystemSpec w;
        w.preset = "wave_lipschitz_t";
        w.n = 1024;
        w.amp = 0.3;
        w.seed = seed;
        const HyperbolicSystem sys = make_system(w);
        SolverConfig cfg;
        cfg.t_end = 3.0;
        const LossReport rep = loss_experiment(sys, LossConfig{}, cfg);
        out.checks.push_back(make_check("lipschitz_beta_hat", rep.beta_hat, "abs<=", 0.05));
        out.detail["lipschitz_rates"] = json::array();
        for (const auto& f : rep.fits) out.detail["lipschitz_rates"].push_back(r12(f.rate));
    }
    return out;
}

LossReport ll_time_loss(Index n, std::uint64_t seed) {
    SystemSpec e;
    e.preset = "eigenframe_ll_t";
    e.n = n;
    e.m = 2;
    e.amp = 0.2;
    e.seed = seed;
    e.terms = 10;
    const HyperbolicSystem sys = make_system(e);
    SolverConfig cfg;
    cfg.t_end = 3.0;
    cfg.dt = 0.25 / double(n);  // the coefficient is x-constant, so refinement must refine time as well
    return loss_experiment(sys, LossConfig{}, cfg);
}

ProbeOutcome probe_loss(std::uint64_t seed) {
    ProbeOutcome out;
    const std::uint64_t sd = 1 + seed;
    const LossConfig lc;
    const LossReport coarse = ll_time_loss(1024, sd);
    const LossReport fine = ll_time_loss(2048, sd);
    out.checks.push_back(make_check("beta_hat", coarse.beta_hat, ">=", 0.1));
    out.checks.push_back(make_check("beta_hat_finite", std::isfinite(coarse.beta_hat) ? 1.0 : 0.0, ">=", 1.0));
    out.checks.push_back(make_check("growth_fit_min_corr", coarse.min_corr, ">=", 0.9));
    out.checks.push_back(
        make_check("refinement_change", std::abs(fine.beta_hat - coarse.beta_hat) / coarse.beta_hat, "<=", 0.2));

    const double beta = 1.2 * coarse.beta_hat;
    const std::size_t half = coarse.runs.size() / 2;
    const GronwallFit fit = fit_gronwall(coarse, lc.s, beta);
    GronwallFit slack = fit;
    slack.C1 *= 1.1;
    const GronwallSweep sweep = gronwall_sweep(fine, lc.s, beta, slack);
    out.checks.push_back(make_check("gronwall_refined_margin", sweep.margin, ">=", -1e-12));
    const GronwallFit lo = fit_gronwall(coarse, lc.s, beta, 0, half), hi = fit_gronwall(coarse, lc.s, beta, half);
    out.checks.push_back(make_check("gronwall_rate_uniform_in_frequency", hi.C2 - lo.C2, "<=", 0.05));
    const GronwallFit lo0 = fit_gronwall(coarse, lc.s, 0.0, 0, half), hi0 = fit_gronwall(coarse, lc.s, 0.0, half);
    out.checks.push_back(make_check("no_shift_rate_grows_with_frequency", hi0.C2 - lo0.C2, ">", 0.05, false));

    out.detail["beta_hat"] = r12(coarse.beta_hat);
    out.detail["beta_hat_fine"] = r12(fine.beta_hat);
    out.detail["C1"] = r12(fit.C1);
    out.detail["C2"] = r12(fit.C2);
    out.detail["rates"] = json::array();
    for (const auto& f : coarse.fits) out.detail["rates"].push_back({{"j", f.j}, {"rate", r12(f.rate)}, {"corr", r12(f.corr)}});
    return out;
}

ProbeOutcome probe_commutator(std::uint64_t seed) {
    ProbeOutcome out;
    const Index n = 256;
    const GridFunction u = sample(n, [](double x) { return cplx(std::sin(x) + 0.3 * std::cos(2.0 * x)); });
    for (const std::string p : {"smooth", "ll_x"}) {
        SystemSpec c;
        c.preset = p;
        c.n = n;
        c.amp = 0.3;
        c.seed = 3 + seed;
        c.terms = 3;
        const HyperbolicSystem sys = make_system(c);
        const CommutatorReport r = commutator_probe(sys, u, 0.0);
        out.checks.push_back(make_check(p + "_decay_ratio", r.ratio, "<=", 1e-2));
        out.checks.push_back(make_check(p + "_monotone", r.monotone ? 1.0 : 0.0, ">=", 1.0));
        out.detail[p + "_rate"] = r12(r.rate);
    }
    return out;
}

// ---- brute-force oracles --------------------------------------------------------------------------

ProbeOutcome probe_oracle(std::uint64_t seed) {
    ProbeOutcome out;
    const Index n = 32;
    const DyadicPartition part(n);
    const AdmissibleCutoff psi = make_psi_minus3(part);
    const GridFunction c = gen_ll_function(n, derive_seed(seed, 51), j_max_for(n) - 1);
    double worst = 0.0;
    auto compare = [&](const Symbol& a, const GridFunction& u) {
        const MatrixXcd M = paradiff_matrix(a, 0.0);
        const GridFunction ref = apply_dense(M, u);
        const GridFunction got = apply_paradiff(a, 0.0, u);
        worst = std::max(worst, max_abs_diff(ref, got) / std::max(sup_norm(ref), 1e-300));
    };
    compare(smooth_symbol(scalar_symbol(c, ik, 1.0, 0.0), psi), random_field(n, 1, derive_seed(seed, 52), 0.0));
    Symbol mat = make_symbol(n, 2, 1.0, 0.0);
    MatrixXcd base(2, 2);
    base << 1.0, 0.5, cplx(0.2, 0.1), -1.0;
    add_term(mat, CoefficientPath::constant(scalar_matrix_field(c, base)), ik);
    add_term(mat, CoefficientPath::constant(constant_matrix_field(n, MatrixXcd::Identity(2, 2))), one);
    compare(smooth_symbol(mat, psi), random_field(n, 2, derive_seed(seed, 53), 0.0));
    out.checks.push_back(make_check("paradiff_vs_dense", worst, "<=", 1e-12));

    double bony = 0.0;
    for (Index nn : {Index(32), Index(1024)}) {
        const GridFunction a = random_field(nn, 1, derive_seed(seed, 54, std::uint64_t(nn)), 0.5);
        const GridFunction u = random_field(nn, 1, derive_seed(seed, 55, std::uint64_t(nn)), 0.5);
        const GridFunction prod(a.values.cwiseProduct(u.values));
        const GridFunction sum = paraproduct(a, u) + paraproduct(u, a) + bony_remainder(a, u);
        bony = std::max(bony, max_abs_diff(prod, sum) / sup_norm(prod));
    }
    out.checks.push_back(make_check("bony_identity", bony, "<=", 1e-10));
    return out;
}

const std::map<std::string, std::function<ProbeOutcome(std::uint64_t)>>& registry() {
    static const std::map<std::string, std::function<ProbeOutcome(std::uint64_t)>> r = {
        {"dyadic", probe_dyadic},
        {"norms", probe_norms},
        {"mollifier", probe_mollifier},
        {"order:paraproduct", probe_order_paraproduct},
        {"order:action", probe_order_action},
        {"order:cutoff", probe_order_cutoff},
        {"order:composition", probe_order_composition},
        {"order:adjoint", probe_order_adjoint},
        {"order:paralin", probe_order_paralin},
        {"order:time_commutator", probe_order_time_commutator},
        {"symmetrizer", probe_symmetrizer},
        {"no_loss", probe_no_loss},
        {"loss", probe_loss},
        {"commutator", probe_commutator},
        {"oracle", probe_oracle},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& probe_names() {
    static const std::vector<std::string> names = {
        "dyadic",       "norms",         "mollifier",         "order:paraproduct",     "order:action",
        "order:cutoff", "order:composition", "order:adjoint", "order:paralin",        "order:time_commutator",
        "symmetrizer",  "no_loss",       "loss",              "commutator",            "oracle"};
    return names;
}

ProbeOutcome run_probe(const std::string& name, std::uint64_t seed) {
    const auto& r = registry();
    const auto it = r.find(name);
    if (it == r.end()) throw std::invalid_argument("unknown probe '" + name + "'");
    ProbeOutcome o = it->second(seed);
    o.name = name;
    return o;
}

}  // namespace paracalc
