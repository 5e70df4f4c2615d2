#include "paracalc/paradiff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <memory>

#include "paracalc/parallel.hpp"
#include "paracalc/rng.hpp"

namespace paracalc {

namespace {

MatrixXcd spectra(const GridFunction& u) {
    MatrixXcd hat(u.size(), u.components());
    for (Index c = 0; c < u.components(); ++c) hat.col(c) = fft(u.values.col(c));
    return hat;
}

GridFunction filtered(const MatrixXcd& hat, const VectorXd& w) {
    GridFunction out(hat.rows(), hat.cols());
    const VectorXcd wc = w.cast<cplx>();
    for (Index c = 0; c < hat.cols(); ++c) out.values.col(c) = ifft(hat.col(c).cwiseProduct(wc));
    return out;
}

// a u for a scalar (1 column) or matrix (m*m columns) field a.
GridFunction times(const GridFunction& a, const GridFunction& u) {
    if (a.components() == 1) {
        GridFunction out = u;
        for (Index c = 0; c < u.components(); ++c) out.values.col(c) = u.values.col(c).cwiseProduct(a.values.col(0));
        return out;
    }
    return pointwise_apply(a.values, u);
}

void check_pair(const GridFunction& a, const GridFunction& u) {
    if (a.size() != u.size()) throw std::invalid_argument("grid mismatch");
    const Index m = u.components();
    if (a.components() != 1 && a.components() != m * m) throw std::invalid_argument("coefficient shape mismatch");
}

}  // namespace

GridFunction paraproduct(const GridFunction& a, const GridFunction& u) {
    check_pair(a, u);
    const DyadicPartition part(u.size());
    const MatrixXcd ah = spectra(a), uh = spectra(u);
    GridFunction out(u.size(), u.components());
    for (int j = 3; j <= part.top(); ++j)
        out += times(filtered(ah, chi_weights(u.size(), j - 3)), filtered(uh, block_weights(u.size(), j)));
    return out;
}

GridFunction bony_remainder(const GridFunction& a, const GridFunction& u) {
    if (a.components() != 1 || u.components() != 1) throw std::invalid_argument("remainder expects scalar fields");
    check_pair(a, u);
    const DyadicPartition part(u.size());
    const MatrixXcd ah = spectra(a), uh = spectra(u);
    std::vector<GridFunction> da, du;
    for (int j = 0; j <= part.top(); ++j) {
        da.push_back(filtered(ah, block_weights(u.size(), j)));
        du.push_back(filtered(uh, block_weights(u.size(), j)));
    }
    GridFunction out(u.size(), 1);
    for (int j = 0; j <= part.top(); ++j)
        for (int k = std::max(0, j - 2); k <= std::min(part.top(), j + 2); ++k) out += times(da[std::size_t(j)], du[std::size_t(k)]);
    return out;
}

// ---- quantization ------------------------------------------------------------

GridFunction apply_paradiff(const SymbolSlice& sigma, const GridFunction& u) { return sigma.apply(u); }

GridFunction apply_paradiff(const Symbol& sigma, double t, const GridFunction& u) {
    if (!sigma.cutoff) {
        bool x_dependent = false;
        for (const auto& tm : sigma.terms) x_dependent = x_dependent || !tm.coef.x_constant(1e-14);
        static std::atomic<bool> warned{false};
        if (x_dependent && !warned.exchange(true))
            std::clog << "paracalc: quantizing an x-dependent symbol without spectral smoothing\n";
    }
    return SymbolSlice(sigma, t).apply(u);
}

MatrixXcd paradiff_matrix(const Symbol& sigma, double t) {
    const Index n = sigma.n, m = sigma.m;
    const VectorXd x = grid_points(n);
    MatrixXcd M = MatrixXcd::Zero(n * m, n * m);
    for (Index i = 0; i < n; ++i) {
        const double k = double(freq(i, n));
        const MatrixXcd f = sigma.field(t, k);
        for (Index p = 0; p < n; ++p)
            for (Index l = 0; l < n; ++l) {
                const cplx e = std::polar(1.0 / double(n), k * (x(p) - x(l)));
                for (Index r = 0; r < m; ++r)
                    for (Index c = 0; c < m; ++c) M(r * n + p, c * n + l) += e * f(p, r * m + c);
            }
    }
    return M;
}

bool spectrally_admissible(const Symbol& sigma, double t, double eps2, double tol) {
    const Index n = sigma.n;
    std::vector<double> xis = {0.0, 1.0, 3.0};
    for (int j = 2; j <= j_max_for(n); ++j) xis.push_back(std::ldexp(1.0, j));
    for (double xi : xis) {
        const MatrixXcd f = sigma.field(t, xi);
        for (Index c = 0; c < f.cols(); ++c) {
            const VectorXcd h = fft(f.col(c));
            const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
            for (Index i = 0; i < n; ++i)
                if (std::abs(double(freq(i, n))) > eps2 * (1.0 + std::abs(xi)) && std::abs(h(i)) > tol * scale)
                    return false;
        }
    }
    return true;
}

MatrixXcd dense_matrix(const LinearOperator& P, Index n, Index m) {
    MatrixXcd M(n * m, n * m);
    parallel_for(std::size_t(n * m), [&](std::size_t col) {
        GridFunction e(n, m);
        e.values(Index(col) % n, Index(col) / n) = 1.0;
        const GridFunction y = P(e);
        for (Index c = 0; c < m; ++c) M.block(c * n, Index(col), n, 1) = y.values.col(c);
    });
    return M;
}

GridFunction apply_dense(const MatrixXcd& M, const GridFunction& u) {
    const Index n = u.size(), m = u.components();
    const VectorXcd flat = M * Eigen::Map<const VectorXcd>(u.values.data(), n * m);
    return GridFunction(MatrixXcd(Eigen::Map<const MatrixXcd>(flat.data(), n, m)));
}

GridFunction probe_ll_coefficient(Index n, std::uint64_t seed, double offset) {
    const int jm = j_max_for(n);
    const VectorXd x = grid_points(n);
    GridFunction c(n, 1);
    c.values.setConstant(1.0);
    for (int i = 0; i < jm; ++i) {
        const double amp = 0.5 * (offset + i) * std::ldexp(1.0, -i);
        const double ph = phase(seed, std::uint64_t(i));
        for (Index p = 0; p < n; ++p) c.values(p, 0) += amp * std::cos(std::ldexp(1.0, i) * x(p) + ph);
    }
    return c;
}

// ---- order probes --------------------------------------------------------------

const std::vector<SobolevIndex>& default_probe_indices() {
    static const std::vector<SobolevIndex> idx = [] {
        std::vector<SobolevIndex> v;
        for (double s : {-0.7, -0.3, 0.3, 0.7})
            for (double a : {0.0, 1.0}) v.emplace_back(s, a);
        return v;
    }();
    return idx;
}

namespace {

double fit_slope(const std::vector<int>& js, const std::vector<double>& y) {
    const double n = double(js.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < js.size(); ++i) {
        sx += js[i];
        sy += y[i];
        sxx += double(js[i]) * js[i];
        sxy += js[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

GridFunction vector_test(Index n, Index m, int j, int q, int count, std::uint64_t seed) {
    GridFunction u(n, m);
    for (Index c = 0; c < m; ++c) {
        const auto set = dyadic_test_set(n, j, count, derive_seed(seed, std::uint64_t(c) + 1), false);
        u.values.col(c) = set[std::size_t(q)].values.col(0);
    }
    return u;
}

std::vector<OperatorProbeReport> run_suite(const LinearOperator& P, double m, double delta,
                                           const std::vector<SobolevIndex>& indices, const ProbeOptions& opt) {
    const Index n = opt.n;
    require_grid_size(n);
    const int jm = j_max_for(n);
    const int j_hi = opt.j_hi > 0 ? std::min(opt.j_hi, jm) : jm;
    if (opt.tests_per_scale < 1 || opt.j_lo > j_hi) throw std::invalid_argument("empty probe test set");
    std::vector<int> js;
    for (int j = opt.j_lo; j <= j_hi; ++j) js.push_back(j);
    const std::size_t per = std::size_t(opt.tests_per_scale);

    std::vector<GridFunction> us(js.size() * per), pus(js.size() * per);
    parallel_for(us.size(), [&](std::size_t i) {
        us[i] = vector_test(n, opt.components, js[i / per], int(i % per), opt.tests_per_scale, opt.seed);
        pus[i] = P(us[i]);
    });

    bool vanishes = true;
    for (std::size_t i = 0; i < us.size(); ++i) {
        const double scale = std::pow(1.0 + std::ldexp(1.0, js[i / per]), std::max(1.0, m + 1.0));
        if (l2_norm(pus[i]) > 1e-9 * scale * l2_norm(us[i])) vanishes = false;
    }

    std::vector<OperatorProbeReport> out;
    for (const auto& idx : indices) {
        OperatorProbeReport r;
        r.claimed_m = m;
        r.claimed_delta = delta;
        r.s = idx.s;
        r.alpha = idx.alpha;
        r.scales = js;
        r.tol = opt.tol;
        r.log_compensation = opt.compensate ? delta : 0.0;
        r.vanishes = vanishes;
        const SobolevIndex out_idx(idx.s - m, idx.alpha - delta);
        std::vector<double> y;
        for (std::size_t q = 0; q < js.size(); ++q) {
            double best = 0.0;
            for (std::size_t t = 0; t < per; ++t) {
                const std::size_t i = q * per + t;
                best = std::max(best, log_sobolev_norm(pus[i], out_idx) / log_sobolev_norm(us[i], idx));
            }
            r.ratios.push_back(best);
            y.push_back(std::log2(std::max(best, 1e-300) / std::pow(1.0 + js[q], r.log_compensation)));
        }
        if (vanishes) {
            r.fitted_slope = 0.0;
            r.verdict = true;
            r.note = "operator vanishes to roundoff";
        } else {
            if (opt.upper_bound) r.note = "upper bound: slope <= tol";
            r.fitted_slope = fit_slope(js, y);
            r.verdict = opt.upper_bound ? r.fitted_slope <= r.tol : std::abs(r.fitted_slope) <= r.tol;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<OperatorProbeReport> named(std::vector<OperatorProbeReport> v, const std::string& name) {
    for (auto& r : v) r.name = name;
    return v;
}

}  // namespace

std::vector<OperatorProbeReport> operator_order_suite(const LinearOperator& P, double m, double delta,
                                                      const std::vector<SobolevIndex>& indices,
                                                      const ProbeOptions& opt) {
    return run_suite(P, m, delta, indices, opt);
}

OperatorProbeReport operator_order_fit(const LinearOperator& P, double m, double delta, double s, double alpha,
                                       const ProbeOptions& opt) {
    return operator_order_suite(P, m, delta, {SobolevIndex(s, alpha)}, opt).front();
}

OperatorProbeReport worst_of(const std::vector<OperatorProbeReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("no reports");
    auto badness = [](const OperatorProbeReport& r) {
        return (r.verdict ? 0.0 : 1e6) + std::abs(r.fitted_slope) - r.tol;
    };
    return *std::max_element(reports.begin(), reports.end(),
                             [&](const auto& a, const auto& b) { return badness(a) < badness(b); });
}

LinearOperator paradiff_operator(const Symbol& a, double t) {
    auto slice = std::make_shared<const SymbolSlice>(a, t);
    return [slice](const GridFunction& u) { return slice->apply(u); };
}

namespace {

ProbeOptions shaped(const Symbol& a, ProbeOptions opt) {
    opt.n = a.n;
    opt.components = a.m;
    return opt;
}

const AdmissibleCutoff& cutoff_of(const Symbol& a, AdmissibleCutoff& fallback) {
    if (a.cutoff) return *a.cutoff;
    fallback = make_psi_minus3(DyadicPartition(a.n));
    return fallback;
}

}  // namespace

std::vector<OperatorProbeReport> action_probe(const Symbol& a, const ProbeOptions& opt,
                                              const std::vector<SobolevIndex>& idx) {
    return named(operator_order_suite(paradiff_operator(a), a.order_m, a.order_delta, idx, shaped(a, opt)), "action");
}

std::vector<OperatorProbeReport> cutoff_independence_probe(const Symbol& a, const AdmissibleCutoff& psi1,
                                                           const AdmissibleCutoff& psi2, const ProbeOptions& opt,
                                                           const std::vector<SobolevIndex>& idx) {
    const LinearOperator P1 = paradiff_operator(smooth_symbol(a, psi1));
    const LinearOperator P2 = paradiff_operator(smooth_symbol(a, psi2));
    const LinearOperator D = [P1, P2](const GridFunction& u) { return P1(u) - P2(u); };
    return named(operator_order_suite(D, a.order_m - 1.0, a.order_delta + 1.0, idx, shaped(a, opt)),
                 "cutoff_independence");
}

std::vector<OperatorProbeReport> composition_remainder_probe(const Symbol& a, const Symbol& b, const ProbeOptions& opt,
                                                             bool tilde, double t,
                                                             const std::vector<SobolevIndex>& idx) {
    AdmissibleCutoff fb;
    const AdmissibleCutoff psi = cutoff_of(a, fb);
    const Symbol A = tilde ? tilde_symbol(smooth_symbol(a, psi)) : smooth_symbol(a, psi);
    const Symbol B = tilde ? tilde_symbol(smooth_symbol(b, psi)) : smooth_symbol(b, psi);
    const LinearOperator TA = paradiff_operator(A, t), TB = paradiff_operator(B, t);
    const LinearOperator TAB = paradiff_operator(smooth_symbol(multiply(A, B, t), psi));
    const LinearOperator R = [TA, TB, TAB](const GridFunction& u) { return TA(TB(u)) - TAB(u); };
    return named(operator_order_suite(R, a.order_m + b.order_m - 1.0, a.order_delta + b.order_delta + 1.0, idx,
                                      shaped(a, opt)),
                 tilde ? "composition_tilde" : "composition");
}

std::vector<OperatorProbeReport> adjoint_remainder_probe(const Symbol& a, const ProbeOptions& opt,
                                                         const std::vector<SobolevIndex>& idx) {
    if (a.n > 1024) {
        OperatorProbeReport r;
        r.name = "adjoint";
        r.claimed_m = a.order_m - 1.0;
        r.claimed_delta = a.order_delta + 1.0;
        r.gated = false;
        r.verdict = false;
        r.note = "skipped: dense adjoint limited to N <= 1024";
        return {r};
    }
    AdmissibleCutoff fb;
    const AdmissibleCutoff psi = cutoff_of(a, fb);
    const Symbol A = smooth_symbol(freeze(a, 0.0), psi);
    const Symbol As = smooth_symbol(adjoint_symbol(A), psi);
    const auto M = std::make_shared<const MatrixXcd>(dense_matrix(paradiff_operator(A), a.n, a.m).adjoint());
    const LinearOperator TAs = paradiff_operator(As);
    const LinearOperator R = [M, TAs](const GridFunction& u) { return apply_dense(*M, u) - TAs(u); };
    return named(operator_order_suite(R, a.order_m - 1.0, a.order_delta + 1.0, idx, shaped(a, opt)), "adjoint");
}

GridFunction paralin_residual(const GridFunction& a, const GridFunction& u, int deriv_order) {
    if (deriv_order < 0 || deriv_order > 1) throw std::invalid_argument("derivative order must be 0 or 1");
    check_pair(a, u);
    const GridFunction du = deriv_order == 0 ? u : derivative(u, 1);
    return times(a, du) - paraproduct(a, du);
}

std::vector<OperatorProbeReport> paralin_probe(const GridFunction& a, double gamma, double rho, int deriv_order,
                                               const std::vector<SobolevIndex>& idx, const ProbeOptions& opt) {
    ProbeOptions o = opt;
    o.n = a.size();
    o.components = 1;
    o.upper_bound = true;
    const LinearOperator D = [a, deriv_order](const GridFunction& u) { return paralin_residual(a, u, deriv_order); };
    return named(run_suite(D, double(deriv_order) - gamma, -rho, idx, o), "paralin");
}

TimeCommutatorReport time_commutator_probe(const Symbol& a, double t, const ProbeOptions& opt,
                                           const std::vector<SobolevIndex>& idx) {
    AdmissibleCutoff fb;
    const AdmissibleCutoff psi = cutoff_of(a, fb);
    const Symbol base = smooth_symbol(a, psi);
    const Symbol at = tilde_symbol(base);
    const Symbol dat = time_derivative(at);
    TimeCommutatorReport rep;

    // u(tau) = u0 + tau u1 with spectrum across every block
    const Index n = a.n, m = a.m;
    GridFunction u0(n, m), u1(n, m);
    for (int j = 0; j <= j_max_for(n); ++j) {
        u0 += vector_test(n, m, j, 0, 2, derive_seed(opt.seed, 101));
        u1 += vector_test(n, m, j, 1, 2, derive_seed(opt.seed, 101));
    }
    auto F = [&](double tau) { return SymbolSlice(at, tau).apply(u0 + tau * u1); };
    const double h = std::ldexp(1.0, -16);
    const GridFunction dF = (1.0 / (12.0 * h)) * (F(t - 2 * h) - 8.0 * F(t - h) + 8.0 * F(t + h) - F(t + 2 * h));
    const GridFunction lhs = dF - SymbolSlice(at, t).apply(u1);
    const GridFunction rhs = SymbolSlice(dat, t).apply(u0 + t * u1);
    const double scale = std::max({sup_norm(rhs), sup_norm(lhs), 1e-300});
    rep.identity_residual = max_abs_diff(lhs, rhs) / scale;
    if (sup_norm(rhs) == 0.0 && sup_norm(lhs) < 1e-12 * std::max(1.0, sup_norm(u0))) rep.identity_residual = 0.0;

    ProbeOptions o = shaped(a, opt);
    rep.commutator_order =
        named(operator_order_suite(paradiff_operator(dat, t), a.order_m, a.order_delta + 1.0, idx, o), "time_commutator");
    const LinearOperator Ta = paradiff_operator(base, t), Tt = paradiff_operator(at, t);
    const LinearOperator D = [Ta, Tt](const GridFunction& u) { return Ta(u) - Tt(u); };
    o.tol = opt.remainder_tol;
    rep.tilde_difference =
        named(operator_order_suite(D, a.order_m - 1.0, a.order_delta + 1.0, idx, o), "tilde_difference");
    return rep;
}

}  // namespace paracalc
