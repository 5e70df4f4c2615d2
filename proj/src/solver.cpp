#include "paracalc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "paracalc/dyadic.hpp"
#include "paracalc/parallel.hpp"

namespace paracalc {

namespace {

VectorXd dealias_mask(Index n) {
    VectorXd w(n);
    const double cut = double(n) / 3.0;
    for (Index i = 0; i < n; ++i) w(i) = std::abs(double(freq(i, n))) <= cut ? 1.0 : 0.0;
    return w;
}

VectorXcd derivative_weights(Index n, const VectorXd& mask) {
    VectorXcd w(n);
    for (Index i = 0; i < n; ++i) w(i) = cplx(0.0, double(freq(i, n))) * mask(i);
    return w;
}

GridFunction real_apply(const MatrixXd& field, const GridFunction& u) {
    const Index m = u.components();
    GridFunction out(u.size(), m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) out.values.col(r) += u.values.col(c).cwiseProduct(field.col(r * m + c));
    return out;
}

double max_row_norm(const MatrixXd& field) {
    double best = 0.0;
    for (Index x = 0; x < field.rows(); ++x) best = std::max(best, field.row(x).norm());
    return best;
}

void fit_line(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept,
              double& corr) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
    slope = vx > 0.0 ? cxy / vx : 0.0;
    intercept = (sy - slope * sx) / n;
    corr = vx > 0.0 && vy > 0.0 ? cxy / std::sqrt(vx * vy) : 0.0;
}

}  // namespace

GridFunction rhs(const HyperbolicSystem& sys, double t, const GridFunction& u, bool dealias) {
    const Index n = u.size();
    thread_local Index cached_n = 0;
    thread_local VectorXd mask_on;
    thread_local VectorXcd dw_on, dw_off;
    if (cached_n != n) {
        mask_on = dealias_mask(n);
        dw_on = derivative_weights(n, mask_on);
        dw_off = derivative_weights(n, VectorXd::Ones(n));
        cached_n = n;
    }
    const VectorXcd& dw = dealias ? dw_on : dw_off;
    const MatrixXd A = sys.A(t);
    // x-independent coefficients create no new modes, so the product needs no filtering
    const bool a_const = (A.rowwise() - A.row(0)).cwiseAbs().maxCoeff() == 0.0;
    GridFunction out;
    if (sys.kind == OperatorKind::NonConservative || a_const) {
        out = -1.0 * real_apply(A, apply_weights(u, dw));
        if (dealias && !a_const) out = apply_weights(out, mask_on);
    } else {
        const GridFunction ud = dealias ? apply_weights(u, mask_on) : u;
        out = -1.0 * apply_weights(real_apply(A, ud), dw);
    }
    if (sys.B) {
        const GridFunction bu = real_apply(sys.B(t), u);
        out -= dealias ? apply_weights(bu, mask_on) : bu;
    }
    if (sys.f) out.values += sys.f(t).cast<cplx>();
    return out;
}

double coefficient_bound(const HyperbolicSystem& sys, double t_end) {
    double k0 = sys.reg.linf;
    const int samples = sys.t_dependent ? 65 : 1;
    for (int i = 0; i < samples; ++i) k0 = std::max(k0, max_row_norm(sys.A(t_end * double(i) / 64.0)));
    return 1.05 * k0;
}

double cfl_step(const HyperbolicSystem& sys, const SolverConfig& cfg) {
    const double dx = kTwoPi / double(sys.n);
    const double k0 = coefficient_bound(sys, cfg.t_end);
    return k0 > 0.0 ? cfg.cfl * dx / k0 : cfg.t_end;
}

void evolve(const HyperbolicSystem& sys, const GridFunction& u0, const SolverConfig& cfg, const Observer& observe) {
    if (u0.size() != sys.n || u0.components() != sys.m) throw std::invalid_argument("initial data shape");
    if (!(cfg.t_end > 0.0) || cfg.record_stride < 1) throw std::invalid_argument("bad solver configuration");
    const double dx = kTwoPi / double(sys.n);
    const double k0 = coefficient_bound(sys, cfg.t_end);
    const double limit = k0 > 0.0 ? cfg.cfl * dx / k0 : cfg.t_end;
    double dt = cfg.dt > 0.0 ? cfg.dt : limit;
    if (dt > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "CFL violation: dt=" << dt << " exceeds " << limit;
        throw NumericalGuardError(msg.str());
    }
    const long steps = long(std::ceil(cfg.t_end / dt - 1e-9));
    dt = cfg.t_end / double(steps);
    GridFunction u = u0;
    observe(0.0, u);
    for (long s = 0; s < steps; ++s) {
        const double t = double(s) * dt;
        if (sys.t_dependent && dt * max_row_norm(sys.A(t)) > cfg.cfl * dx * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "CFL violation at t=" << t << ": the coefficient outgrew the step";
            throw NumericalGuardError(msg.str());
        }
        const GridFunction k1 = rhs(sys, t, u, cfg.dealias);
        const GridFunction k2 = rhs(sys, t + 0.5 * dt, u + cplx(0.5 * dt) * k1, cfg.dealias);
        const GridFunction k3 = rhs(sys, t + 0.5 * dt, u + cplx(0.5 * dt) * k2, cfg.dealias);
        const GridFunction k4 = rhs(sys, t + dt, u + cplx(dt) * k3, cfg.dealias);
        u.values += (dt / 6.0) * (k1.values + 2.0 * k2.values + 2.0 * k3.values + k4.values);
        if (!u.values.allFinite()) {
            std::ostringstream msg;
            msg << "non-finite state at t=" << t + dt;
            throw NumericalGuardError(msg.str());
        }
        if ((s + 1) % cfg.record_stride == 0 || s + 1 == steps) observe(double(s + 1) * dt, u);
    }
}

Trajectory evolve(const HyperbolicSystem& sys, const GridFunction& u0, const SolverConfig& cfg) {
    Trajectory tr;
    tr.scenario = sys.name;
    evolve(sys, u0, cfg, [&](double t, const GridFunction& u) {
        tr.times.push_back(t);
        tr.states.push_back(u);
        if (sys.f) tr.Lu_record.emplace_back(MatrixXcd(sys.f(t).cast<cplx>()));
    });
    return tr;
}

GridFunction j_epsilon(const GridFunction& u, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
    return apply_multiplier(u, std::function<cplx(double)>([eps](double k) { return cplx(1.0 / std::sqrt(1.0 + eps * k * k)); }));
}

CommutatorReport commutator_probe(const HyperbolicSystem& sys, const GridFunction& u, double s, double t,
                                  std::vector<double> eps) {
    if (eps.empty())
        for (int k = 2; k <= 12; ++k) eps.push_back(std::ldexp(1.0, -k));
    const MatrixXd A = sys.A(t), B = sys.b_field(t);
    const GridFunction du = derivative(u);
    CommutatorReport rep;
    rep.eps = eps;
    for (double e : eps) {
        GridFunction g = real_apply(A, j_epsilon(du, e)) - j_epsilon(real_apply(A, du), e);
        g += real_apply(B, j_epsilon(u, e)) - j_epsilon(real_apply(B, u), e);
        rep.norms.push_back(log_sobolev_norm(g, SobolevIndex(s)));
    }
    const double first = rep.norms.front(), last = rep.norms.back();
    const double scale = std::max({first, l2_norm(u), 1e-300});
    if (first <= 1e-13 * scale) {
        rep.ratio = 0.0;
        rep.monotone = true;
        rep.verdict = *std::max_element(rep.norms.begin(), rep.norms.end()) <= 1e-13 * scale;
        return rep;
    }
    rep.ratio = last / first;
    rep.monotone = true;
    for (std::size_t i = 1; i < rep.norms.size(); ++i)
        if (rep.norms[i] > 1.05 * rep.norms[i - 1]) rep.monotone = false;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (rep.norms[i] > 0.0) {
            lx.push_back(std::log2(eps[i]));
            ly.push_back(std::log2(rep.norms[i]));
        }
    double b = 0.0, c = 0.0;
    fit_line(lx, ly, rep.rate, b, c);
    rep.verdict = rep.monotone && rep.ratio <= 1e-2;
    return rep;
}

// ---- loss of derivatives ----------------------------------------------------------------

LossReport loss_experiment(const HyperbolicSystem& sys, const LossConfig& lc, const SolverConfig& cfg) {
    if (lc.j_lo < 0 || lc.j_hi < lc.j_lo) throw std::invalid_argument("bad packet range");
    // the packets are single modes 2^j; they must sit inside the dealiased band
    if (std::ldexp(1.0, lc.j_hi) > double(sys.n) / 3.0)
        throw std::invalid_argument("packet range is not resolved on this grid");
    const int count = lc.j_hi - lc.j_lo + 1;
    const double dt = cfg.dt > 0.0 ? cfg.dt : cfl_step(sys, cfg);
    const long steps = long(std::ceil(cfg.t_end / dt - 1e-9));
    SolverConfig run_cfg = cfg;
    run_cfg.dt = cfg.t_end / double(steps);
    run_cfg.record_stride = int(std::max<long>(1, steps / std::max(1, lc.records)));

    LossReport rep;
    rep.fits.resize(std::size_t(count));
    rep.runs.resize(std::size_t(count));
    parallel_for(std::size_t(count), [&](std::size_t q) {
        const int j = lc.j_lo + int(q);
        GridFunction u0(sys.n, sys.m);
        u0.values.col(0) = mode(sys.n, long(1) << j).values.col(0);
        rep.runs[q] = evolve(sys, u0, run_cfg);
        PacketFit& f = rep.fits[q];
        f.j = j;
        const double base = log_sobolev_norm(u0, SobolevIndex(lc.s));
        std::vector<double> wt, wg;
        for (std::size_t l = 0; l < rep.runs[q].size(); ++l) {
            const double t = rep.runs[q].times[l];
            const double g = std::log2(log_sobolev_norm(rep.runs[q].states[l], SobolevIndex(lc.s)) / base);
            f.times.push_back(t);
            f.g.push_back(g);
            if (t >= lc.fit_from * cfg.t_end - 1e-12) {
                wt.push_back(t);
                wg.push_back(g);
            }
        }
        fit_line(wt, wg, f.rate, f.intercept, f.corr);
    });
    std::vector<double> js, rates, top_j, top_r;
    const int top_from = lc.j_hi - int(std::floor(double(count - 1) * lc.top_fraction));
    rep.min_corr = 1.0;
    for (const auto& f : rep.fits) {
        js.push_back(f.j);
        rates.push_back(f.rate);
        if (f.j >= top_from) {
            top_j.push_back(f.j);
            top_r.push_back(f.rate);
            rep.min_corr = std::min(rep.min_corr, f.corr);
        }
    }
    double b = 0.0, c = 0.0;
    fit_line(js, rates, rep.beta_hat_all, b, c);
    fit_line(top_j, top_r, rep.beta_hat, b, c);
    return rep;
}

namespace {

// log of the refined left-hand side over ||u0||_{H^s}, per record.
std::vector<double> refined_log_ratio(const Trajectory& run, double s, double beta) {
    EnergySchedule sched;
    sched.s = s;
    sched.beta = beta;
    const GronwallReport g = gronwall_check(run, sched, 1.0, 0.0);
    const double u0 = log_sobolev_norm(run.states[0], SobolevIndex(s));
    std::vector<double> out;
    for (double v : g.lhs_refined) out.push_back(std::log(v / u0));
    return out;
}

}  // namespace

GronwallFit fit_gronwall(const LossReport& rep, double s, double beta, std::size_t first, std::size_t last) {
    last = std::min(last, rep.runs.size());
    if (first >= last) throw std::invalid_argument("empty packet range for the Gronwall fit");
    GronwallFit fit;
    std::vector<std::vector<double>> logs(last - first);
    for (std::size_t q = first; q < last; ++q) {
        logs[q - first] = refined_log_ratio(rep.runs[q], s, beta);
        double slope = 0.0, b = 0.0, c = 0.0;
        fit_line(rep.runs[q].times, logs[q - first], slope, b, c);
        fit.C2 = std::max(fit.C2, slope);
    }
    double c1 = 0.0;
    for (std::size_t q = first; q < last; ++q)
        for (std::size_t l = 0; l < logs[q - first].size(); ++l)
            c1 = std::max(c1, logs[q - first][l] - fit.C2 * rep.runs[q].times[l]);
    fit.C1 = std::exp(c1);
    return fit;
}

GronwallSweep gronwall_sweep(const LossReport& rep, double s, double beta, const GronwallFit& fit) {
    GronwallSweep sw;
    sw.margin = std::numeric_limits<double>::infinity();
    EnergySchedule sched;
    sched.s = s;
    sched.beta = beta;
    for (const auto& run : rep.runs) {
        sw.per_packet.push_back(gronwall_check(run, sched, fit.C1, fit.C2));
        sw.margin = std::min(sw.margin, sw.per_packet.back().margin_refined);
    }
    sw.verdict = sw.margin >= -1e-12;
    return sw;
}

// ---- exports --------------------------------------------------------------------------------

void write_trajectory_csv(const std::string& path, const Trajectory& run) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,x_index,component,re,im\n" << std::setprecision(12);
    for (std::size_t l = 0; l < run.size(); ++l)
        for (Index c = 0; c < run.states[l].components(); ++c)
            for (Index x = 0; x < run.states[l].size(); ++x) {
                const cplx v = run.states[l].values(x, c);
                out << run.times[l] << ',' << x << ',' << c << ',' << v.real() << ',' << v.imag() << '\n';
            }
}

void write_spectral_summary_csv(const std::string& path, const Trajectory& run) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,j,block_l2\n" << std::setprecision(12);
    for (std::size_t l = 0; l < run.size(); ++l) {
        const std::vector<GridFunction> blocks = dyadic_blocks(run.states[l]);
        for (std::size_t j = 0; j < blocks.size(); ++j)
            out << run.times[l] << ',' << j << ',' << l2_norm(blocks[j]) << '\n';
    }
}

void write_loss_csv(const std::string& path, const LossReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "j,t,g,rate,corr\n" << std::setprecision(12);
    for (const auto& f : rep.fits)
        for (std::size_t l = 0; l < f.times.size(); ++l)
            out << f.j << ',' << f.times[l] << ',' << f.g[l] << ',' << f.rate << ',' << f.corr << '\n';
}

}  // namespace paracalc
