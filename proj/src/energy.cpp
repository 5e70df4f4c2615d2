#include "paracalc/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "paracalc/dyadic.hpp"
#include "paracalc/parallel.hpp"
#include "paracalc/rng.hpp"

namespace paracalc {

void EnergySchedule::validate() const {
    if (!(mu >= 2.0)) throw std::invalid_argument("mu must be at least 2");
    if (!(beta >= 0.0) || !(T_star > 0.0)) throw std::invalid_argument("need beta >= 0 and T* > 0");
    if (kind == OperatorKind::NonConservative) {
        if (!(beta * T_star < s)) throw std::invalid_argument("schedule violates beta T* < s");
    } else {
        if (!(s > -gamma && s < 0.0)) throw std::invalid_argument("conservative schedule needs s in (-gamma, 0)");
        if (!(beta * T_star < gamma + s)) throw std::invalid_argument("schedule violates beta T* < gamma + s");
    }
}

double theta(double xi) { return smooth_step(std::abs(xi) - 1.0); }

VectorXd theta_weights(Index n, double mu) {
    VectorXd w(n);
    for (Index i = 0; i < n; ++i) w(i) = theta_mu(double(freq(i, n)), mu);
    return w;
}

MatrixXcd hermitian_sqrt_field(const MatrixXcd& field, Index m) {
    MatrixXcd out(field.rows(), m * m);
    MatrixXcd a(m, m);
    for (Index x = 0; x < field.rows(); ++x) {
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < m; ++c) a(r, c) = field(x, r * m + c);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (a + a.adjoint()));
        const VectorXd ev = es.eigenvalues();
        if (ev.minCoeff() < -1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff()))
            throw std::domain_error("symmetrizer sample is not positive");
        const MatrixXcd root = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                               es.eigenvectors().adjoint();
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < m; ++c) out(x, r * m + c) = root(r, c);
    }
    return out;
}

Symbol sigma_tilde(const Symmetrizer& S, double mu, double t_end, Index n_t) {
    if (!(mu >= 2.0)) throw std::invalid_argument("mu must be at least 2");
    if (S.lambda <= 0.0) throw std::domain_error("symmetrizer is not positive");
    const Index n = S.n, m = S.m;
    Symbol sig = make_symbol(n, m, 0.0, 0.0);
    sig.x_class.kind = XClass::LL;
    CoefficientPath path;
    if (S.t_dependent) {
        if (n_t == 0) n_t = Index(std::ceil(4.0 * t_end * std::ldexp(1.0, j_max_for(n)))) + 1;
        path = S.path(t_end, n_t);
        sig.t_class = TClass::LL;
    } else {
        path = CoefficientPath::constant(S.field(0.0));
    }
    add_term(sig, std::move(path), [mu](double xi) { return cplx(1.0 - theta_mu(xi, mu)); });
    sig.terms[0].post_map = [m](const MatrixXcd& f) { return hermitian_sqrt_field(f, m); };
    if (S.t_dependent) sig = tilde_symbol(sig);
    return smooth_symbol(sig, make_psi_minus3(DyadicPartition(n)));
}

double sigma_square_residual(const Symbol& sigma, const Symmetrizer& S, double mu, double t, double xi) {
    const Index m = S.m;
    const MatrixXcd root = sigma.raw_field(0, t, xi) * (1.0 - theta_mu(xi, mu));
    // S~ at the same band, without the square root
    Symbol plain = sigma;
    plain.terms[0].post_map = nullptr;
    const MatrixXcd s = plain.raw_field(0, t, xi);
    const double w = 1.0 - theta_mu(xi, mu);
    double worst = 0.0;
    MatrixXcd a(m, m), b(m, m);
    for (Index x = 0; x < root.rows(); ++x) {
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < m; ++c) {
                a(r, c) = root(x, r * m + c);
                b(r, c) = s(x, r * m + c);
            }
        worst = std::max(worst, (a * a - w * w * b).cwiseAbs().maxCoeff());
    }
    return worst;
}

// ---- energy functional --------------------------------------------------------------

EnergyFunctional::EnergyFunctional(const Symmetrizer& S, double mu, double t_end, Index n_t)
    : mu_(mu), sigma_(sigma_tilde(S, mu, t_end, n_t)) {}

std::shared_ptr<const SymbolSlice> EnergyFunctional::slice(double t) const {
    const double key = sigma_.t_constant() ? 0.0 : t;
    {
        std::lock_guard<std::mutex> lock(mu_cache_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto s = std::make_shared<const SymbolSlice>(sigma_, key);
    std::lock_guard<std::mutex> lock(mu_cache_);
    if (cache_.size() > 64 && key != 0.0) cache_.clear();
    return cache_.emplace(key, s).first->second;
}

GridFunction EnergyFunctional::apply_sigma(const GridFunction& u, double t) const {
    return apply_paradiff(*slice(t), u);
}

double EnergyFunctional::quantity(const GridFunction& u, double t, const SobolevIndex& idx) const {
    const double hi = log_sobolev_norm(apply_sigma(u, t), idx);
    const double lo = log_sobolev_norm(apply_weights(u, theta_weights(u.size(), mu_)), idx);
    return hi * hi + lo * lo;
}

EnergyValues EnergyFunctional::energy(const GridFunction& u, double t, const EnergySchedule& sched) const {
    const GridFunction su = apply_sigma(u, t);
    const GridFunction lu = apply_weights(u, theta_weights(u.size(), mu_));
    const double st = sched.s_at(t);
    EnergyValues v;
    for (int k = 0; k < 2; ++k) {
        const SobolevIndex idx(st, k == 0 ? 0.0 : 0.5);
        const double a = log_sobolev_norm(su, idx), b = log_sobolev_norm(lu, idx);
        (k == 0 ? v.E : v.E_log) = a * a + b * b;
    }
    return v;
}

// ---- calibration ---------------------------------------------------------------------

std::vector<GridFunction> calibration_corpus(Index n, Index m, std::uint64_t seed) {
    const int jm = j_max_for(n);
    const long kmax = resolved_cutoff(n);
    std::vector<GridFunction> out;
    for (int i = 0; i < 20; ++i) {
        SplitMix rng(derive_seed(seed, std::uint64_t(i)));
        const long band = std::min<long>(kmax, long(1) << (1 + i % (jm + 1)));
        SpectralCoeffs c;
        c.coeffs = MatrixXcd::Zero(n, m);
        for (Index comp = 0; comp < m; ++comp)
            for (long k = -band; k <= band; ++k) {
                const double re = rng.normal(), im = rng.normal();
                c.coeffs(freq_index(k, n), comp) = cplx(re, im);
            }
        out.push_back(from_spectral(c));
    }
    for (int i = 0; i < 20; ++i) {
        const int j = i % (jm + 1);
        GridFunction u(n, m);
        for (Index comp = 0; comp < m; ++comp)
            u.values.col(comp) = dyadic_test_set(n, j, 1, derive_seed(seed, 1000 + std::uint64_t(i * 8 + comp)), false)[0]
                                     .values.col(0);
        out.push_back(u);
    }
    return out;
}

CalibrationResult calibrate_mu(const Symmetrizer& S, const std::vector<GridFunction>& corpus,
                               const std::vector<SobolevIndex>& indices) {
    if (corpus.empty() || indices.empty()) throw std::invalid_argument("empty calibration corpus");
    CalibrationResult res;
    res.threshold = 2.0 / std::sqrt(std::min(S.lambda, 1.0));
    for (double mu = 2.0; mu <= 1024.0; mu *= 2.0) {
        const EnergyFunctional ef(S, mu);
        std::vector<double> lo(corpus.size()), hi(corpus.size());
        parallel_for(corpus.size(), [&](std::size_t q) {
            double c_mu = 0.0, c0 = 0.0;
            for (const auto& idx : indices) {
                const double nu = log_sobolev_norm(corpus[q], idx);
                const double e = std::sqrt(ef.quantity(corpus[q], 0.0, idx));
                if (nu == 0.0) continue;
                c_mu = std::max(c_mu, e > 0.0 ? nu / e : std::numeric_limits<double>::infinity());
                c0 = std::max(c0, e / nu);
            }
            lo[q] = c_mu;
            hi[q] = c0;
        });
        res.tried.push_back(mu);
        res.mu = mu;
        res.C_mu = *std::max_element(lo.begin(), lo.end());
        res.C0 = *std::max_element(hi.begin(), hi.end());
        if (std::isfinite(res.C_mu) && res.C_mu <= res.threshold) {
            res.ok = true;
            return res;
        }
    }
    return res;
}

// ---- energy inequality along a trajectory -----------------------------------------------

EnergyDerivativeReport energy_derivative_probe(const Trajectory& run, const EnergyFunctional& energy,
                                               const EnergySchedule& sched) {
    const std::size_t L = run.size();
    if (L < 5) throw std::invalid_argument("trajectory too short for centered differences");
    for (std::size_t l = 1; l < L; ++l) {
        const double h0 = run.times[1] - run.times[0], h = run.times[l] - run.times[l - 1];
        if (!(h > 0.0) || std::abs(h - h0) > 1e-9 * h0) throw std::invalid_argument("records must be uniform in t");
    }
    std::vector<EnergyValues> ev(L);
    std::vector<double> src(L, 0.0);
    parallel_for(L, [&](std::size_t l) {
        const double t = run.times[l];
        ev[l] = energy.energy(run.states[l], t, sched);
        if (!run.Lu_record.empty()) {
            const GridFunction& f = run.Lu_record[l];
            const SobolevIndex idx(sched.s_at(t));
            const double a = log_sobolev_norm(energy.apply_sigma(f, t), idx);
            const double b = log_sobolev_norm(apply_weights(f, theta_weights(f.size(), energy.mu())), idx);
            src[l] = 2.0 * std::sqrt(ev[l].E) * (a + b);
        }
    });
    EnergyDerivativeReport rep;
    for (std::size_t l = 1; l + 1 < L; ++l) {
        const double d = (ev[l + 1].E - ev[l - 1].E) / (run.times[l + 1] - run.times[l - 1]);
        rep.times.push_back(run.times[l]);
        rep.dE.push_back(d);
        rep.E.push_back(ev[l].E);
        rep.E_log.push_back(ev[l].E_log);
        rep.source.push_back(src[l]);
        const double excess = std::max(0.0, d - src[l]);
        if (excess > 0.0) {
            rep.C1 = std::max(rep.C1, ev[l].E > 0.0 ? excess / ev[l].E : std::numeric_limits<double>::infinity());
            rep.C23 = std::max(rep.C23,
                               ev[l].E_log > 0.0 ? excess / ev[l].E_log : std::numeric_limits<double>::infinity());
        }
    }
    return rep;
}

GronwallReport gronwall_check(const Trajectory& run, const EnergySchedule& sched, double C1, double C2) {
    const std::size_t L = run.size();
    if (L == 0) throw std::invalid_argument("empty trajectory");
    std::vector<double> nu(L), nu_log(L), nf(L, 0.0);
    parallel_for(L, [&](std::size_t l) {
        const double st = sched.s_at(run.times[l]);
        nu[l] = log_sobolev_norm(run.states[l], SobolevIndex(st));
        nu_log[l] = log_sobolev_norm(run.states[l], SobolevIndex(st, 0.5));
        if (!run.Lu_record.empty()) nf[l] = log_sobolev_norm(run.Lu_record[l], SobolevIndex(st));
    });
    const double u0 = log_sobolev_norm(run.states[0], SobolevIndex(sched.s));
    GronwallReport rep;
    rep.margin = rep.margin_refined = std::numeric_limits<double>::infinity();
    double sup = 0.0, int_f = 0.0, int_u2 = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        const double t = run.times[l];
        if (l > 0) {
            const double h = t - run.times[l - 1];
            int_f += 0.5 * h * (nf[l] + nf[l - 1]);
            int_u2 += 0.5 * h * (nu_log[l] * nu_log[l] + nu_log[l - 1] * nu_log[l - 1]);
        }
        sup = std::max(sup, nu[l]);
        const double rhs = C1 * std::exp(C2 * t) * (u0 + int_f);
        const double refined = sup + std::sqrt(int_u2);
        rep.times.push_back(t);
        rep.lhs.push_back(sup);
        rep.lhs_refined.push_back(refined);
        rep.rhs.push_back(rhs);
        const double m1 = rhs > 0.0 ? (rhs - sup) / rhs : (sup > 0.0 ? -1.0 : 0.0);
        const double m2 = rhs > 0.0 ? (rhs - refined) / rhs : (refined > 0.0 ? -1.0 : 0.0);
        if (m1 < rep.margin) {
            rep.margin = m1;
            rep.worst_time = t;
        }
        rep.margin_refined = std::min(rep.margin_refined, m2);
    }
    // margins are relative, so only round-off separates an exact tie from zero
    rep.verdict = rep.margin >= -1e-12;
    rep.verdict_refined = rep.margin_refined >= -1e-12;
    return rep;
}

double norm_ladder_rate(const GridFunction& v, double s_t, double ds_dt) {
    const SpectralCoeffs c = to_spectral(v);
    const Index n = v.size();
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double k2 = 1.0 + double(freq(i, n)) * double(freq(i, n));
        acc += std::log(k2) * std::pow(k2, s_t) * c.coeffs.row(i).squaredNorm();
    }
    return ds_dt * acc;
}

void write_energy_csv(const std::string& path, const Trajectory& run, const EnergyFunctional& energy,
                      const EnergySchedule& sched, const GronwallReport& gronwall) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    std::vector<EnergyValues> ev(run.size());
    parallel_for(run.size(), [&](std::size_t l) { ev[l] = energy.energy(run.states[l], run.times[l], sched); });
    out << "t,s_t,E,E_log,norm_Hs_t,margin\n" << std::setprecision(12);
    for (std::size_t l = 0; l < run.size(); ++l) {
        const double t = run.times[l];
        const double rhs = l < gronwall.rhs.size() ? gronwall.rhs[l] : 0.0;
        const double margin = rhs > 0.0 ? (rhs - gronwall.lhs_refined[l]) / rhs : 0.0;
        out << t << ',' << sched.s_at(t) << ',' << ev[l].E << ',' << ev[l].E_log << ','
            << log_sobolev_norm(run.states[l], SobolevIndex(sched.s_at(t))) << ',' << margin << '\n';
    }
}

}  // namespace paracalc
