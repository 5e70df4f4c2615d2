#include "paracalc/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace paracalc {

namespace {

MatrixXd block_of(const MatrixXd& field, Index x, Index m) {
    MatrixXd a(m, m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) a(r, c) = field(x, r * m + c);
    return a;
}

void store_block(MatrixXd& field, Index x, const MatrixXd& a) {
    const Index m = a.rows();
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) field(x, r * m + c) = a(r, c);
}

std::vector<Index> points_of(const SampleSet& s, Index n) {
    if (!s.points.empty()) return s.points;
    std::vector<Index> all(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) all[std::size_t(i)] = i;
    return all;
}

VectorXd real_grid(const GridFunction& g) { return g.values.col(0).real(); }

std::vector<double> uniform_times(double t_end, int count) {
    std::vector<double> t;
    for (int i = 0; i < count; ++i) t.push_back(t_end * double(i) / double(count - 1));
    return t;
}

}  // namespace

MatrixXd HyperbolicSystem::b_field(double t) const { return B ? B(t) : MatrixXd::Zero(n, m * m); }

MatrixXd HyperbolicSystem::forcing(double t) const { return f ? f(t) : MatrixXd::Zero(n, m); }

MatrixXd HyperbolicSystem::a_at(double t, Index x) const { return block_of(A(t), x, m); }

MatrixXd HyperbolicSystem::b_at(double t, Index x) const { return block_of(b_field(t), x, m); }

// ---- construction ---------------------------------------------------------------

HyperbolicSystem modulated_system(Index n, const MatrixXd& a0, std::function<VectorXd(double)> c, bool t_dependent,
                                  const std::string& name) {
    require_grid_size(n);
    HyperbolicSystem s;
    s.name = name;
    s.n = n;
    s.m = a0.rows();
    s.t_dependent = t_dependent;
    const Index m = s.m;
    s.A = [n, m, a0, c](double t) {
        const VectorXd cx = c(t);
        MatrixXd out(n, m * m);
        for (Index r = 0; r < m; ++r)
            for (Index q = 0; q < m; ++q) out.col(r * m + q) = a0(r, q) * cx;
        return out;
    };
    return s;
}

HyperbolicSystem wave_reduction(Index n, std::function<VectorXd(double)> a, bool t_dependent, const std::string& name) {
    require_grid_size(n);
    HyperbolicSystem s;
    s.name = name;
    s.n = n;
    s.m = 2;
    s.t_dependent = t_dependent;
    s.A = [n, a](double t) {
        MatrixXd out = MatrixXd::Zero(n, 4);
        out.col(1) = a(t);
        out.col(2).setOnes();
        return out;
    };
    return s;
}

HyperbolicSystem eigenframe_system(Index n, std::function<double(double)> g, const std::string& name) {
    require_grid_size(n);
    HyperbolicSystem s;
    s.name = name;
    s.n = n;
    s.m = 2;
    s.t_dependent = true;
    s.A = [n, g](double t) {
        const double gt = g(t);
        const double t1 = kPi / 4 + gt, t2 = 3 * kPi / 4 - gt;
        Eigen::Matrix2d R;
        R << std::cos(t1), std::cos(t2), std::sin(t1), std::sin(t2);
        const Eigen::Matrix2d a = R * Eigen::Vector2d(1.0, -1.0).asDiagonal() * R.inverse();
        MatrixXd out(n, 4);
        for (Index k = 0; k < 4; ++k) out.col(k).setConstant(a(k / 2, k % 2));
        return out;
    };
    return s;
}

HyperbolicSystem make_system(const SystemSpec& spec) {
    const Index n = spec.n;
    require_grid_size(n);
    const double amp = spec.amp;
    const std::uint64_t seed = spec.seed;
    const int J = spec.terms;
    auto ones = [n] { return VectorXd::Ones(n); };
    const VectorXd x = grid_points(n);
    MatrixXd a0 = spec.a0.size() ? spec.a0 : MatrixXd::Identity(spec.m, spec.m);
    if (a0.rows() != a0.cols()) throw std::invalid_argument("a0 must be square");

    HyperbolicSystem s;
    const std::string& p = spec.preset;
    if (p == "constant") {
        s = modulated_system(n, a0, [ones](double) { return ones(); }, false, p);
    } else if (p == "smooth") {
        const VectorXd c = VectorXd::Ones(n) + amp * x.array().sin().matrix();
        s = modulated_system(n, a0, [c](double) { return c; }, false, p);
    } else if (p == "ll_x") {
        const VectorXd c = VectorXd::Ones(n) + amp * real_grid(gen_ll_function(n, seed, J));
        s = modulated_system(n, a0, [c](double) { return c; }, false, p);
    } else if (p == "ll_t") {
        s = modulated_system(n, a0, [n, amp, seed, J](double t) {
            return VectorXd::Constant(n, 1.0 + amp * ll_time_value(seed, J, t));
        }, true, p);
    } else if (p == "ll_tx") {
        const VectorXd f = real_grid(gen_ll_function(n, seed, J));
        s = modulated_system(n, a0, [f, amp, seed, J](double t) {
            return VectorXd(VectorXd::Ones(f.size()) + amp * ll_time_value(seed + 1, J, t) * f);
        }, true, p);
    } else if (p == "wave") {
        const VectorXd c = VectorXd::Ones(n) + amp * x.array().sin().matrix();
        s = wave_reduction(n, [c](double) { return c; }, false, p);
    } else if (p == "wave_ll_x") {
        const VectorXd c = VectorXd::Ones(n) + amp * real_grid(gen_ll_function(n, seed, J));
        s = wave_reduction(n, [c](double) { return c; }, false, p);
    } else if (p == "wave_lipschitz_t") {
        s = wave_reduction(n, [n, amp](double t) { return VectorXd::Constant(n, 1.0 + amp * std::sin(t)); }, true, p);
    } else if (p == "wave_ll_t") {
        s = wave_reduction(n, [n, amp, seed, J](double t) {
            return VectorXd::Constant(n, 1.0 + amp * ll_time_value(seed, J, t));
        }, true, p);
    } else if (p == "eigenframe_ll_t") {
        s = eigenframe_system(n, [amp, seed, J](double t) { return amp * ll_time_value(seed, J, t); }, p);
    } else {
        throw std::invalid_argument("unknown system preset '" + p + "'");
    }
    s.kind = spec.kind;
    const Index m = s.m;

    MatrixXd b = MatrixXd::Zero(n, m * m);
    if (spec.b0.size()) {
        if (spec.b0.rows() != m || spec.b0.cols() != m) throw std::invalid_argument("b0 has the wrong size");
        for (Index r = 0; r < m; ++r)
            for (Index q = 0; q < m; ++q) b.col(r * m + q).setConstant(spec.b0(r, q));
    }
    if (spec.holder_gamma > 0.0) {
        const VectorXd h = spec.b_amp * real_grid(gen_holder_function(n, spec.holder_gamma, seed + 7, J));
        for (Index r = 0; r < m; ++r) b.col(r * m + r) += h;
    }
    if (b.cwiseAbs().maxCoeff() > 0.0) s.B = [b](double) { return b; };

    const std::vector<double> times = s.t_dependent ? uniform_times(1.0, 513) : std::vector<double>{0.0};
    s.reg = measure_regularity(s, times, spec.holder_gamma);
    return s;
}

// ---- regularity -------------------------------------------------------------------

RegularitySeminorms measure_regularity(const HyperbolicSystem& sys, const std::vector<double>& times,
                                       double holder_gamma) {
    RegularitySeminorms r;
    const Index n = sys.n, m = sys.m;
    std::vector<MatrixXd> as, bs;
    for (double t : times) {
        as.push_back(sys.A(t));
        bs.push_back(sys.b_field(t));
    }
    for (std::size_t q = 0; q < times.size(); ++q)
        for (Index x = 0; x < n; ++x) {
            r.linf = std::max(r.linf, as[q].row(x).norm());
            r.linf = std::max(r.linf, bs[q].row(x).norm());
        }
    // x-regularity at a handful of times, t-regularity at a handful of points
    const std::size_t stride_t = std::max<std::size_t>(1, times.size() / 4);
    for (std::size_t q = 0; q < times.size(); q += stride_t)
        for (Index e = 0; e < m * m; ++e) {
            GridFunction col(MatrixXcd(as[q].col(e).cast<cplx>()));
            r.ll_x = std::max(r.ll_x, ll_seminorm_direct(col));
            if (holder_gamma > 0.0) {
                GridFunction bc(MatrixXcd(bs[q].col(e).cast<cplx>()));
                r.holder_k2 = std::max(r.holder_k2, holder_seminorm_direct(bc, holder_gamma));
            }
        }
    r.holder_gamma = holder_gamma;
    if (sys.t_dependent && times.size() > 1) {
        const double dt = times[1] - times[0];
        const Index stride_x = std::max<Index>(1, n / 16);
        for (Index x = 0; x < n; x += stride_x)
            for (Index e = 0; e < m * m; ++e) {
                VectorXd path(Index(times.size()));
                for (std::size_t q = 0; q < times.size(); ++q) path(Index(q)) = as[q](x, e);
                r.ll_t = std::max(r.ll_t, ll_seminorm_path(path, dt));
            }
    }
    return r;
}

bool regularity_consistent(const HyperbolicSystem& sys, const std::vector<double>& times) {
    const RegularitySeminorms got = measure_regularity(sys, times, sys.reg.holder_gamma);
    const double f = 1.05;
    return got.linf <= f * sys.reg.linf + 1e-14 && got.ll_x <= f * sys.reg.ll_x + 1e-14 &&
           got.ll_t <= f * sys.reg.ll_t + 1e-14 && got.holder_k2 <= f * sys.reg.holder_k2 + 1e-14;
}

MatrixXcd principal_symbol(const HyperbolicSystem& sys, double t, Index x, double k) {
    return (k * sys.a_at(t, x)).cast<cplx>();
}

// ---- hyperbolicity ------------------------------------------------------------------

HyperbolicityReport check_hyperbolic(const HyperbolicSystem& sys, const SampleSet& samples) {
    if (samples.times.empty()) throw std::invalid_argument("empty sample set");
    HyperbolicityReport rep;
    rep.min_gap = std::numeric_limits<double>::infinity();
    double worst_ratio = 0.0;
    for (double t : samples.times) {
        const MatrixXd field = sys.A(t);
        for (Index x : points_of(samples, sys.n)) {
            const MatrixXd a = block_of(field, x, sys.m);
            Eigen::EigenSolver<MatrixXd> es(a, false);
            if (es.info() != Eigen::Success) throw std::runtime_error("eigen-solver failure");
            const VectorXcd ev = es.eigenvalues();
            std::vector<double> re;
            double im = 0.0;
            for (Index i = 0; i < ev.size(); ++i) {
                re.push_back(ev(i).real());
                im = std::max(im, std::abs(ev(i).imag()));
            }
            std::sort(re.begin(), re.end());
            for (std::size_t i = 1; i < re.size(); ++i) rep.min_gap = std::min(rep.min_gap, re[i] - re[i - 1]);
            rep.eigenvalues.insert(rep.eigenvalues.end(), re.begin(), re.end());
            rep.max_imag = std::max(rep.max_imag, im);
            worst_ratio = std::max(worst_ratio, im / std::max(a.norm(), 1e-300));
        }
    }
    rep.verdict = worst_ratio <= 1e-9;
    return rep;
}

// ---- symmetrizers ---------------------------------------------------------------------

MatrixXcd Symmetrizer::at(double t, Index x, double) const {
    const MatrixXcd f = field(t);
    MatrixXcd s(m, m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) s(r, c) = f(x, r * m + c);
    return s;
}

Symmetrizer Symmetrizer::scaled(double c) const {
    Symmetrizer s = *this;
    auto f = field;
    s.field = [f, c](double t) { return MatrixXcd(c * f(t)); };
    s.lambda *= c;
    s.Lambda *= c;
    return s;
}

CoefficientPath Symmetrizer::path(double t_end, Index n_t) const {
    if (!t_dependent) return CoefficientPath::constant(field(0.0));
    std::vector<MatrixXcd> samples;
    for (Index l = 0; l < n_t; ++l) samples.push_back(field(t_end * double(l) / double(n_t - 1)));
    return CoefficientPath::sampled(std::move(samples), t_end);
}

Symmetrizer identity_symmetrizer(Index n, Index m) {
    Symmetrizer s;
    s.n = n;
    s.m = m;
    const MatrixXcd f = constant_matrix_field(n, MatrixXcd::Identity(m, m));
    s.field = [f](double) { return f; };
    s.lambda = s.Lambda = 1.0;
    return s;
}

namespace {

// Eigen-frame symmetrizer of one real matrix. Returns false on a gap violation.
bool frame_symmetrizer(const MatrixXd& a, MatrixXd& S, double& gap) {
    const Index m = a.rows();
    Eigen::EigenSolver<MatrixXd> es(a, true);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigen-solver failure");
    std::vector<Index> order(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) order[std::size_t(i)] = i;
    const VectorXcd ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](Index p, Index q) { return ev(p).real() < ev(q).real(); });
    gap = std::numeric_limits<double>::infinity();
    for (Index i = 1; i < m; ++i) gap = std::min(gap, ev(order[std::size_t(i)]).real() - ev(order[std::size_t(i - 1)]).real());
    if (m > 1 && gap < 1e-6 * std::max(a.norm(), 1e-300)) return false;
    MatrixXd R(m, m);
    for (Index i = 0; i < m; ++i) {
        VectorXd v = es.eigenvectors().col(order[std::size_t(i)]).real();
        v.normalize();
        for (Index k = 0; k < m; ++k)
            if (std::abs(v(k)) > 1e-14) {
                if (v(k) < 0) v = -v;
                break;
            }
        R.col(i) = v;
    }
    const MatrixXd Ri = R.inverse();
    S = Ri.transpose() * Ri;
    S = 0.5 * (S + S.transpose());
    return true;
}

bool symmetric_everywhere(const HyperbolicSystem& sys, const SampleSet& samples) {
    for (double t : samples.times) {
        const MatrixXd field = sys.A(t);
        for (Index x = 0; x < sys.n; ++x) {
            const MatrixXd a = block_of(field, x, sys.m);
            if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, a.norm())) return false;
        }
    }
    return true;
}

}  // namespace

Symmetrizer build_symmetrizer(const HyperbolicSystem& sys, const SampleSet& samples) {
    if (symmetric_everywhere(sys, samples) && !sys.t_dependent) return identity_symmetrizer(sys.n, sys.m);
    const Index n = sys.n, m = sys.m;
    const FieldFn A = sys.A;
    Symmetrizer s;
    s.n = n;
    s.m = m;
    s.t_dependent = sys.t_dependent;
    s.field = [n, m, A](double t) {
        const MatrixXd field = A(t);
        MatrixXd out(n, m * m);
        for (Index x = 0; x < n; ++x) {
            MatrixXd S;
            double gap = 0.0;
            if (!frame_symmetrizer(block_of(field, x, m), S, gap)) {
                std::ostringstream msg;
                msg << "eigenvalues coalesce at t=" << t << ", x index " << x << " (gap " << gap << ")";
                throw std::domain_error(msg.str());
            }
            store_block(out, x, S);
        }
        return MatrixXcd(out.cast<cplx>());
    };
    s.lambda = std::numeric_limits<double>::infinity();
    s.Lambda = 0.0;
    for (double t : samples.times) {
        const MatrixXcd f = s.field(t);
        for (Index x : points_of(samples, n)) {
            MatrixXcd sx(m, m);
            for (Index r = 0; r < m; ++r)
                for (Index c = 0; c < m; ++c) sx(r, c) = f(x, r * m + c);
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sx);
            s.lambda = std::min(s.lambda, es.eigenvalues().minCoeff());
            s.Lambda = std::max(s.Lambda, es.eigenvalues().maxCoeff());
        }
    }
    return s;
}

double SymmetrizerReport::max_residual() const {
    return std::max({hermitian_residual, positivity_residual, symmetrizing_residual, homogeneity_residual});
}

SymmetrizerReport verify_symmetrizer(const Symmetrizer& S, const HyperbolicSystem& sys, const SampleSet& samples) {
    SymmetrizerReport rep;
    rep.lambda = std::numeric_limits<double>::infinity();
    const Index m = S.m;
    for (double t : samples.times) {
        const MatrixXcd sf = S.field(t);
        const MatrixXd af = sys.A(t);
        for (Index x : points_of(samples, S.n)) {
            MatrixXcd s(m, m);
            for (Index r = 0; r < m; ++r)
                for (Index c = 0; c < m; ++c) s(r, c) = sf(x, r * m + c);
            const double scale = std::max(1.0, s.norm());
            rep.hermitian_residual = std::max(rep.hermitian_residual, (s - s.adjoint()).norm() / scale);
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (s + s.adjoint()));
            const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
            rep.lambda = std::min(rep.lambda, lo);
            rep.Lambda = std::max(rep.Lambda, hi);
            rep.positivity_residual = std::max({rep.positivity_residual, std::max(0.0, S.lambda - lo) / scale,
                                                std::max(0.0, hi - S.Lambda) / scale, std::max(0.0, -lo)});
            const MatrixXcd sa = s * block_of(af, x, m).cast<cplx>();
            const double na = std::max(1e-300, block_of(af, x, m).norm() * scale);
            rep.symmetrizing_residual = std::max(rep.symmetrizing_residual, (sa - sa.adjoint()).norm() / na);
        }
        for (Index e = 0; e < m * m; ++e) {
            GridFunction re(MatrixXcd(sf.col(e).real().cast<cplx>()));
            rep.ll_x = std::max(rep.ll_x, ll_seminorm_direct(re));
        }
    }
    if (S.t_dependent) {
        const std::vector<double> ts = uniform_times(1.0, 257);
        std::vector<MatrixXcd> fs;
        for (double t : ts) fs.push_back(S.field(t));
        const Index stride = std::max<Index>(1, S.n / 8);
        for (Index x = 0; x < S.n; x += stride)
            for (Index e = 0; e < m * m; ++e) {
                VectorXd path(Index(ts.size()));
                for (std::size_t q = 0; q < ts.size(); ++q) path(Index(q)) = fs[q](x, e).real();
                rep.ll_t = std::max(rep.ll_t, ll_seminorm_path(path, ts[1] - ts[0]));
            }
    }
    return rep;
}

}  // namespace paracalc
