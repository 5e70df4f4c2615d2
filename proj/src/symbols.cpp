#include "paracalc/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace paracalc {

// ---- cutoff ----------------------------------------------------------------

namespace {

double block_profile(int k, double xi) { return k == 0 ? chi(xi) : phi(std::ldexp(xi, -k)); }

int top_block_for(double xi) {
    const double a = std::abs(xi);
    if (a <= 1.0) return 1;
    return int(std::ceil(std::log2(a))) + 2;
}

}  // namespace

double AdmissibleCutoff::operator()(double eta, double xi) const {
    double acc = 0.0;
    for (int k = 0; k <= top_block_for(xi); ++k) {
        const double b = block_profile(k, xi);
        if (b != 0.0) acc += chi(std::ldexp(eta, -(k + shift))) * b;
    }
    return acc;
}

VectorXd AdmissibleCutoff::eta_filter(int k, Index n) const { return chi_weights(n, k + shift); }

AdmissibleCutoff make_cutoff(int shift, const DyadicPartition& part) {
    AdmissibleCutoff c;
    c.shift = shift;
    // the support fractions are scale-free; a 256-point sweep measures them at full resolution
    const long half = long(std::min<Index>(part.n, 256) / 2);
    double e1 = std::numeric_limits<double>::infinity(), e2 = 0.0;
    for (long xi = -half; xi < half; ++xi)
        for (long eta = -half; eta < half; ++eta) {
            const double v = c(double(eta), double(xi));
            const double r = std::abs(double(eta)) / (1.0 + std::abs(double(xi)));
            if (v < 1.0 - 1e-14) e1 = std::min(e1, r);
            if (v > 1e-14) e2 = std::max(e2, r);
        }
    // psi == 1 strictly inside e1 and == 0 strictly beyond e2 on the grid
    c.eps1 = e1;
    c.eps2 = e2;
    return c;
}

// ---- mollifier -------------------------------------------------------------

namespace {

double raw_bump(double t) {
    const double a = std::abs(t);
    if (a >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

}  // namespace

double mollifier_constant() {
    static const double c = [] {
        const int nodes = 401;
        const double h = 2.0 / double(nodes - 1);
        double acc = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
            acc += w * raw_bump(-1.0 + h * double(i));
        }
        return 1.0 / (acc * h);
    }();
    return c;
}

double mollifier(double t) { return mollifier_constant() * raw_bump(t); }

double mollifier_derivative(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    const double q = 1.0 - t * t;
    return mollifier(t) * (-2.0 * t / (q * q));
}

KernelWeights kernel_weights(double t, double eps, Index n_samples, double dt) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollifier width must be positive");
    if (n_samples < 2) throw std::invalid_argument("kernel needs a sampled path");
    if (eps < 4.0 * dt * (1.0 - 1e-12))
        throw std::invalid_argument("mollifier under-resolved: eps = " + std::to_string(eps) +
                                    " needs at least 4 samples (dt = " + std::to_string(dt) + ")");
    const long lo = long(std::floor((t - eps) / dt)), hi = long(std::ceil((t + eps) / dt));
    std::map<Index, std::pair<double, double>> acc;
    double d = 0.0, dd = 0.0;
    std::vector<std::pair<Index, std::pair<double, double>>> raw;
    for (long l = lo; l <= hi; ++l) {
        const double tau = (t - double(l) * dt) / eps;
        const double r = mollifier(tau) / eps;
        const double rp = mollifier_derivative(tau) / (eps * eps);
        if (r == 0.0 && rp == 0.0) continue;
        d += r;
        dd += rp;
        const Index idx = std::clamp<long>(l, 0, long(n_samples) - 1);
        raw.push_back({idx, {r, rp}});
    }
    if (d <= 0.0) throw std::runtime_error("empty mollifier support");
    for (const auto& [idx, rr] : raw) {
        auto& slot = acc[idx];
        slot.first += rr.first / d;
        slot.second += rr.second / d - rr.first * dd / (d * d);
    }
    KernelWeights w;
    for (const auto& [idx, vv] : acc) {
        w.index.push_back(idx);
        w.value.push_back(vv.first);
        w.deriv.push_back(vv.second);
    }
    return w;
}

// ---- coefficient paths -----------------------------------------------------

void CoefficientPath::check_shape(Index r, Index c) {
    if (rows_ == 0 && cols_ == 0) {
        rows_ = r;
        cols_ = c;
        return;
    }
    if (r != rows_ || c != cols_) throw std::invalid_argument("coefficient field shape mismatch");
}

CoefficientPath CoefficientPath::constant(const MatrixXcd& field) {
    CoefficientPath p;
    p.check_shape(field.rows(), field.cols());
    p.pieces_.push_back({std::nullopt, field});
    return p;
}

CoefficientPath CoefficientPath::separable(const TimePath& g, const MatrixXcd& field) {
    if (g.samples() < 2) return constant(field * g.values(0));
    CoefficientPath p;
    p.check_shape(field.rows(), field.cols());
    p.pieces_.push_back({g, field});
    return p;
}

CoefficientPath CoefficientPath::sampled(std::vector<MatrixXcd> samples, double t_end) {
    if (samples.empty()) throw std::invalid_argument("no samples");
    if (samples.size() == 1) return constant(samples[0]);
    CoefficientPath p;
    for (const auto& s : samples) p.check_shape(s.rows(), s.cols());
    p.dense_ = std::move(samples);
    p.dense_t_end_ = t_end;
    return p;
}

CoefficientPath& CoefficientPath::operator+=(const CoefficientPath& o) {
    if (o.empty()) return *this;
    check_shape(o.rows_, o.cols_);
    for (const auto& pc : o.pieces_) pieces_.push_back(pc);
    if (!o.dense_.empty()) {
        if (dense_.empty()) {
            dense_ = o.dense_;
            dense_t_end_ = o.dense_t_end_;
        } else {
            if (dense_.size() != o.dense_.size() || dense_t_end_ != o.dense_t_end_)
                throw std::invalid_argument("dense sample grids differ");
            for (std::size_t l = 0; l < dense_.size(); ++l) dense_[l] += o.dense_[l];
        }
    }
    return *this;
}

CoefficientPath CoefficientPath::scaled(cplx c) const {
    CoefficientPath p = *this;
    for (auto& pc : p.pieces_) pc.field *= c;
    for (auto& s : p.dense_) s *= c;
    return p;
}

bool CoefficientPath::t_constant() const {
    if (!dense_.empty()) return false;
    for (const auto& pc : pieces_)
        if (pc.g) return false;
    return true;
}

bool CoefficientPath::x_constant(double tol) const {
    auto flat = [tol](const MatrixXcd& f) {
        for (Index i = 1; i < f.rows(); ++i)
            if ((f.row(i) - f.row(0)).cwiseAbs().maxCoeff() > tol) return false;
        return true;
    };
    for (const auto& pc : pieces_)
        if (!flat(pc.field)) return false;
    for (const auto& s : dense_)
        if (!flat(s)) return false;
    return true;
}

double CoefficientPath::finest_dt() const {
    double dt = std::numeric_limits<double>::infinity();
    for (const auto& pc : pieces_)
        if (pc.g) dt = std::min(dt, pc.g->dt());
    if (!dense_.empty()) dt = std::min(dt, dense_t_end_ / double(dense_.size() - 1));
    return dt;
}

double CoefficientPath::t_end() const {
    double t = 0.0;
    for (const auto& pc : pieces_)
        if (pc.g) t = std::max(t, pc.g->t_end);
    if (!dense_.empty()) t = std::max(t, dense_t_end_);
    return t;
}

MatrixXcd CoefficientPath::value(double t) const {
    MatrixXcd out = MatrixXcd::Zero(rows_, cols_);
    for (const auto& pc : pieces_) out += (pc.g ? pc.g->at(t) : 1.0) * pc.field;
    if (!dense_.empty()) {
        const double dt = dense_t_end_ / double(dense_.size() - 1);
        if (t <= 0.0) {
            out += dense_.front();
        } else if (t >= dense_t_end_) {
            out += dense_.back();
        } else {
            const Index l = std::min<Index>(Index(t / dt), Index(dense_.size()) - 2);
            const double w = t / dt - double(l);
            out += (1.0 - w) * dense_[l] + w * dense_[l + 1];
        }
    }
    return out;
}

MatrixXcd CoefficientPath::mollified(double t, double eps, bool derivative) const {
    MatrixXcd out = MatrixXcd::Zero(rows_, cols_);
    for (const auto& pc : pieces_) {
        if (!pc.g) {
            if (!derivative) out += pc.field;
            continue;
        }
        const KernelWeights kw = kernel_weights(t, eps, pc.g->samples(), pc.g->dt());
        double g = 0.0;
        for (std::size_t q = 0; q < kw.index.size(); ++q)
            g += (derivative ? kw.deriv[q] : kw.value[q]) * pc.g->values(kw.index[q]);
        out += g * pc.field;
    }
    if (!dense_.empty()) {
        const KernelWeights kw =
            kernel_weights(t, eps, Index(dense_.size()), dense_t_end_ / double(dense_.size() - 1));
        for (std::size_t q = 0; q < kw.index.size(); ++q)
            out += (derivative ? kw.deriv[q] : kw.value[q]) * dense_[kw.index[q]];
    }
    return out;
}

MatrixXcd constant_matrix_field(Index n, const MatrixXcd& a) {
    const Index m = a.rows();
    MatrixXcd f(n, m * m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) f.col(r * m + c).setConstant(a(r, c));
    return f;
}

MatrixXcd scalar_matrix_field(const GridFunction& f, const MatrixXcd& a) {
    const Index m = a.rows();
    MatrixXcd out(f.size(), m * m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) out.col(r * m + c) = f.values.col(0) * a(r, c);
    return out;
}

// ---- symbols ---------------------------------------------------------------

int tilde_band(double xi, int j_max) {
    const double a = std::abs(xi);
    if (a <= 1.0) return 0;
    return std::min(j_max, int(std::lround(std::log2(a))));
}

Symbol make_symbol(Index n, Index m, double order_m, double order_delta) {
    require_grid_size(n);
    Symbol a;
    a.n = n;
    a.m = m;
    a.order_m = order_m;
    a.order_delta = order_delta;
    return a;
}

void add_term(Symbol& a, CoefficientPath coef, std::function<cplx(double)> weight) {
    if (coef.rows() != a.n || coef.blocks() != a.m * a.m)
        throw std::invalid_argument("term coefficient shape does not match symbol");
    a.terms.push_back({std::move(coef), std::move(weight), nullptr, {}});
}

Symbol multiplier_symbol(Index n, std::function<cplx(double)> w, double order_m, double order_delta) {
    Symbol a = make_symbol(n, 1, order_m, order_delta);
    add_term(a, CoefficientPath::constant(MatrixXcd::Ones(n, 1)), std::move(w));
    return a;
}

Symbol scalar_symbol(const GridFunction& c, std::function<cplx(double)> w, double order_m, double order_delta,
                     XClass cls) {
    if (c.components() != 1) throw std::invalid_argument("scalar symbol needs a scalar coefficient");
    Symbol a = make_symbol(c.size(), 1, order_m, order_delta);
    a.x_class.kind = cls;
    add_term(a, CoefficientPath::constant(c.values), std::move(w));
    return a;
}

Symbol separable_symbol(const TimePath& g, const GridFunction& c, std::function<cplx(double)> w, double order_m,
                        double order_delta) {
    Symbol a = scalar_symbol(c, std::move(w), order_m, order_delta);
    a.t_class = TClass::LL;
    a.terms[0].coef = CoefficientPath::separable(g, c.values);
    return a;
}

double Symbol::t_end() const {
    double t = 0.0;
    for (const auto& tm : terms) t = std::max(t, tm.coef.t_end());
    return t;
}

bool Symbol::t_constant() const {
    for (const auto& tm : terms)
        if (tm.band_fields.empty() && !tm.coef.t_constant()) return false;
    return true;
}

Index Symbol::n_t() const {
    double dt = std::numeric_limits<double>::infinity();
    for (const auto& tm : terms) dt = std::min(dt, tm.coef.finest_dt());
    if (!std::isfinite(dt)) return 1;
    return Index(std::llround(t_end() / dt)) + 1;
}

namespace {

MatrixXcd time_smoothed(const Symbol& a, const SymbolTerm& tm, double t, double eps_or_band_eps) {
    MatrixXcd f;
    switch (a.time_mode) {
        case TimeSmoothing::None:
            if (a.d_dt) throw std::logic_error("time derivative needs a time-smoothed symbol");
            f = tm.coef.value(t);
            break;
        default:
            f = tm.coef.mollified(t, eps_or_band_eps, a.d_dt);
            break;
    }
    if (tm.post_map) f = tm.post_map(f);
    return f;
}

double eps_for(const Symbol& a, double xi) {
    if (a.time_mode == TimeSmoothing::Fixed) return a.eps;
    if (a.time_mode == TimeSmoothing::Tilde) return tilde_eps(tilde_band(xi, j_max_for(a.n)));
    return 0.0;
}

MatrixXcd filter_field(const MatrixXcd& f, const VectorXd& w) {
    MatrixXcd out(f.rows(), f.cols());
    for (Index c = 0; c < f.cols(); ++c) out.col(c) = ifft(fft(f.col(c)).cwiseProduct(w.cast<cplx>()));
    return out;
}

}  // namespace

MatrixXcd Symbol::raw_field(std::size_t term, double t, double xi) const {
    const SymbolTerm& tm = terms.at(term);
    if (!tm.band_fields.empty()) return tm.band_fields[std::size_t(tilde_band(xi, j_max_for(n)))];
    return time_smoothed(*this, tm, t, eps_for(*this, xi));
}

MatrixXcd Symbol::field(double t, double xi) const {
    MatrixXcd out = MatrixXcd::Zero(n, m * m);
    VectorXd psi_w;
    if (cutoff) {
        psi_w.resize(n);
        for (Index i = 0; i < n; ++i) psi_w(i) = (*cutoff)(double(freq(i, n)), xi);
    }
    for (std::size_t r = 0; r < terms.size(); ++r) {
        MatrixXcd f = raw_field(r, t, xi);
        if (cutoff) f = filter_field(f, psi_w);
        out += terms[r].weight(xi) * f;
    }
    return out;
}

MatrixXcd Symbol::eval(double t, Index x_index, double xi) const {
    const MatrixXcd f = field(t, xi);
    MatrixXcd a(m, m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) a(r, c) = f(x_index, r * m + c);
    return a;
}

namespace {

double x_norm(const MatrixXcd& f, const XRegularity& cls) {
    GridFunction g(f);
    switch (cls.kind) {
        case XClass::Linf:
            return sup_norm(g);
        case XClass::LL:
            return ll_seminorm_direct(g);
        case XClass::HolderLog: {
            double best = 0.0;
            for (Index c = 0; c < f.cols(); ++c)
                best = std::max(best, log_besov_norm(GridFunction(MatrixXcd(f.col(c))), cls.gamma, cls.rho,
                                                     kInf, kInf));
            return best;
        }
    }
    return 0.0;
}

}  // namespace

std::vector<double> symbol_seminorm(const Symbol& a, int k_max, const std::vector<double>& times, long xi_max) {
    if (k_max < 0 || k_max > 2) throw std::invalid_argument("seminorm order must be 0, 1 or 2");
    if (xi_max <= 0) xi_max = resolved_cutoff(a.n);
    std::vector<double> table(std::size_t(k_max) + 1, 0.0);
    for (double t : times) {
        std::map<long, MatrixXcd> cache;
        auto at = [&](long xi) -> const MatrixXcd& {
            auto it = cache.find(xi);
            if (it == cache.end()) it = cache.emplace(xi, a.field(t, double(xi))).first;
            return it->second;
        };
        for (long xi = -xi_max; xi <= xi_max; ++xi) {
            const double ax = std::abs(double(xi));
            for (int al = 0; al <= k_max; ++al) {
                MatrixXcd d;
                if (al == 0)
                    d = at(xi);
                else if (al == 1)
                    d = 0.5 * (at(xi + 1) - at(xi - 1));
                else
                    d = at(xi + 1) - 2.0 * at(xi) + at(xi - 1);
                const double w = std::pow(1.0 + ax, -a.order_m + al) * std::pow(std::log(2.0 + ax), -a.order_delta);
                const double v = w * x_norm(d, a.x_class);
                if (!std::isfinite(v)) throw std::runtime_error("non-finite symbol evaluation");
                table[std::size_t(al)] = std::max(table[std::size_t(al)], v);
            }
            cache.erase(xi - 1);
        }
    }
    return table;
}

Symbol smooth_symbol(const Symbol& a, const AdmissibleCutoff& psi) {
    Symbol s = a;
    s.cutoff = psi;
    return s;
}

Symbol mollify_time(const Symbol& a, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
    Symbol s = a;
    s.time_mode = TimeSmoothing::Fixed;
    s.eps = eps;
    if (!s.t_constant()) {
        const double dt = s.t_end() / double(s.n_t() - 1);
        if (eps < 4.0 * dt * (1.0 - 1e-12)) throw std::invalid_argument("mollifier under-resolved");
    }
    return s;
}

Symbol tilde_symbol(const Symbol& a) {
    Symbol s = a;
    s.time_mode = TimeSmoothing::Tilde;
    for (const auto& tm : s.terms) {
        const double dt = tm.coef.finest_dt();
        if (std::isfinite(dt) && tilde_eps(j_max_for(s.n)) < 4.0 * dt * (1.0 - 1e-12))
            throw std::invalid_argument("time grid does not resolve the smallest tilde band");
    }
    return s;
}

Symbol time_derivative(const Symbol& a) {
    if (a.time_mode == TimeSmoothing::None) throw std::logic_error("differentiate a time-smoothed symbol");
    Symbol s = a;
    s.d_dt = true;
    s.order_delta += 1.0;
    return s;
}

double commutation_check(const Symbol& a, const AdmissibleCutoff& psi, const std::vector<double>& times,
                         const std::vector<double>& xis) {
    const Index n = a.n;
    const int jm = j_max_for(n);
    double worst = 0.0;
    for (double xi : xis) {
        VectorXd w(n);
        for (Index i = 0; i < n; ++i) w(i) = psi(double(freq(i, n)), xi);
        const double eps = tilde_eps(tilde_band(xi, jm));
        for (double t : times) {
            // path 1: tilde (mollify at eps(xi)), then filter in x
            MatrixXcd p1 = MatrixXcd::Zero(n, a.m * a.m);
            // path 2: filter every time sample in x, then mollify those filtered samples
            MatrixXcd p2 = MatrixXcd::Zero(n, a.m * a.m);
            for (const auto& tm : a.terms) {
                const cplx wx = tm.weight(xi);
                p1 += wx * filter_field(tm.coef.mollified(t, eps), w);
                if (tm.coef.t_constant()) {
                    p2 += wx * filter_field(tm.coef.value(0.0), w);
                    continue;
                }
                const double dt = tm.coef.finest_dt();
                const Index ns = Index(std::llround(tm.coef.t_end() / dt)) + 1;
                const KernelWeights kw = kernel_weights(t, eps, ns, dt);
                for (std::size_t q = 0; q < kw.index.size(); ++q)
                    p2 += wx * kw.value[q] * filter_field(tm.coef.value(double(kw.index[q]) * dt), w);
            }
            worst = std::max(worst, (p1 - p2).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

Symbol freeze(const Symbol& a, double t) {
    Symbol f = a;
    f.time_mode = TimeSmoothing::None;
    f.d_dt = false;
    f.terms.clear();
    const int jm = j_max_for(a.n);
    for (std::size_t r = 0; r < a.terms.size(); ++r) {
        SymbolTerm tm;
        tm.weight = a.terms[r].weight;
        if (!a.terms[r].band_fields.empty()) {
            tm.band_fields = a.terms[r].band_fields;
            if (a.d_dt)
                for (auto& bf : tm.band_fields) bf.setZero();
        } else if (a.time_mode == TimeSmoothing::Tilde) {
            for (int b = 0; b <= jm; ++b) tm.band_fields.push_back(time_smoothed(a, a.terms[r], t, tilde_eps(b)));
        } else {
            tm.coef = CoefficientPath::constant(time_smoothed(a, a.terms[r], t, a.eps));
        }
        if (tm.band_fields.empty() && tm.coef.empty()) continue;
        if (!tm.band_fields.empty()) tm.coef = CoefficientPath::constant(tm.band_fields[0]);
        f.terms.push_back(std::move(tm));
    }
    return f;
}

namespace {

MatrixXcd field_product(const MatrixXcd& x, const MatrixXcd& y, Index m) {
    MatrixXcd out = MatrixXcd::Zero(x.rows(), m * m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c)
            for (Index q = 0; q < m; ++q) out.col(r * m + c) += x.col(r * m + q).cwiseProduct(y.col(q * m + c));
    return out;
}

}  // namespace

Symbol multiply(const Symbol& a, const Symbol& b, double t) {
    if (a.n != b.n || a.m != b.m) throw std::invalid_argument("symbol shapes differ");
    const Symbol fa = freeze(a, t), fb = freeze(b, t);
    Symbol p = make_symbol(a.n, a.m, a.order_m + b.order_m, a.order_delta + b.order_delta);
    p.x_class = a.x_class;
    const int jm = j_max_for(a.n);
    for (const auto& ta : fa.terms)
        for (const auto& tb : fb.terms) {
            SymbolTerm tm;
            auto wa = ta.weight, wb = tb.weight;
            tm.weight = [wa, wb](double xi) { return wa(xi) * wb(xi); };
            if (ta.band_fields.empty() && tb.band_fields.empty()) {
                tm.coef = CoefficientPath::constant(field_product(ta.coef.value(0.0), tb.coef.value(0.0), a.m));
            } else {
                for (int bnd = 0; bnd <= jm; ++bnd) {
                    const MatrixXcd& x = ta.band_fields.empty() ? ta.coef.value(0.0) : ta.band_fields[std::size_t(bnd)];
                    const MatrixXcd& y = tb.band_fields.empty() ? tb.coef.value(0.0) : tb.band_fields[std::size_t(bnd)];
                    tm.band_fields.push_back(field_product(x, y, a.m));
                }
                tm.coef = CoefficientPath::constant(tm.band_fields[0]);
            }
            p.terms.push_back(std::move(tm));
        }
    return p;
}

Symbol adjoint_symbol(const Symbol& a) {
    const Index m = a.m;
    auto star = [m](const MatrixXcd& f) {
        MatrixXcd out(f.rows(), f.cols());
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < m; ++c) out.col(r * m + c) = f.col(c * m + r).conjugate();
        return out;
    };
    if (!a.t_constant()) throw std::invalid_argument("adjoint symbol expects a t-constant symbol");
    for (const auto& tm : a.terms)
        if (tm.post_map) throw std::invalid_argument("adjoint of a mapped term");
    Symbol s = freeze(a, 0.0);
    for (auto& tm : s.terms) {
        auto w = tm.weight;
        tm.weight = [w](double xi) { return std::conj(w(xi)); };
        if (!tm.band_fields.empty())
            for (auto& bf : tm.band_fields) bf = star(bf);
        tm.coef = CoefficientPath::constant(star(tm.coef.value(0.0)));
    }
    return s;
}

// ---- slices ----------------------------------------------------------------

SymbolSlice::SymbolSlice(const Symbol& a, double t) : n_(a.n), m_(a.m), j_max_(j_max_for(a.n)), cutoff_(a.cutoff) {
    const int top = j_max_ + 1;
    for (std::size_t r = 0; r < a.terms.size(); ++r) {
        const SymbolTerm& tm = a.terms[r];
        weights_.push_back(tm.weight);
        const bool frozen = !tm.band_fields.empty();
        // a t-constant term without a post map is the same in every band
        const bool banded = frozen || (a.time_mode == TimeSmoothing::Tilde && (!tm.coef.t_constant() || a.d_dt));
        const int b_lo = banded ? 0 : -1, b_hi = banded ? j_max_ : -1;
        for (int b = b_lo; b <= b_hi; ++b) {
            Part p;
            p.term = r;
            p.band = b;
            if (frozen) {
                p.field = a.d_dt ? MatrixXcd::Zero(n_, m_ * m_) : tm.band_fields[std::size_t(b)];
            } else {
                const double eps = a.time_mode == TimeSmoothing::Tilde ? tilde_eps(std::max(b, 0)) : a.eps;
                p.field = time_smoothed(a, tm, t, eps);
            }
            if (cutoff_) {
                p.smoothed.resize(std::size_t(top) + 1);
                for (int k = 0; k <= top; ++k) {
                    if (banded) {
                        // skip blocks that never meet this band
                        const VectorXd& blk = block_weights(n_, k);
                        bool meets = false;
                        for (Index i = 0; i < n_ && !meets; ++i)
                            meets = blk(i) != 0.0 && tilde_band(double(freq(i, n_)), j_max_) == b;
                        if (!meets) continue;
                    }
                    p.smoothed[std::size_t(k)] = filter_field(p.field, cutoff_->eta_filter(k, n_));
                }
            }
            parts_.push_back(std::move(p));
        }
    }
}

MatrixXcd SymbolSlice::eval(Index x_index, double xi) const {
    MatrixXcd out = MatrixXcd::Zero(m_, m_);
    for (const auto& p : parts_) {
        if (p.band >= 0 && tilde_band(xi, j_max_) != p.band) continue;
        const cplx w = weights_[p.term](xi);
        Eigen::RowVectorXcd row;
        if (cutoff_) {
            row = Eigen::RowVectorXcd::Zero(m_ * m_);
            for (int k = 0; k < int(p.smoothed.size()); ++k) {
                const double b = block_profile(k, xi);
                if (b == 0.0) continue;
                row += b * p.smoothed[std::size_t(k)].row(x_index);
            }
        } else {
            row = p.field.row(x_index);
        }
        for (Index r = 0; r < m_; ++r)
            for (Index c = 0; c < m_; ++c) out(r, c) += w * row(r * m_ + c);
    }
    return out;
}

GridFunction SymbolSlice::apply(const GridFunction& u) const {
    if (u.size() != n_ || u.components() != m_) throw std::invalid_argument("slice/field shape mismatch");
    MatrixXcd hat(n_, m_);
    for (Index c = 0; c < m_; ++c) hat.col(c) = fft(u.values.col(c));
    GridFunction out(n_, m_);
    for (const auto& p : parts_) {
        VectorXcd sel(n_);
        for (Index i = 0; i < n_; ++i) {
            const double xi = double(freq(i, n_));
            const bool in = p.band < 0 || tilde_band(xi, j_max_) == p.band;
            sel(i) = in ? weights_[p.term](xi) : cplx(0.0);
        }
        auto spread = [&](const VectorXcd& mult) {
            GridFunction v(n_, m_);
            for (Index c = 0; c < m_; ++c) v.values.col(c) = ifft(hat.col(c).cwiseProduct(mult));
            return v;
        };
        if (!cutoff_) {
            if (sel.cwiseAbs().maxCoeff() == 0.0) continue;
            out += pointwise_apply(p.field, spread(sel));
            continue;
        }
        for (int k = 0; k < int(p.smoothed.size()); ++k) {
            if (p.smoothed[std::size_t(k)].size() == 0) continue;
            const VectorXcd mult = sel.cwiseProduct(block_weights(n_, k).cast<cplx>());
            if (mult.cwiseAbs().maxCoeff() == 0.0) continue;
            out += pointwise_apply(p.smoothed[std::size_t(k)], spread(mult));
        }
    }
    return out;
}

}  // namespace paracalc
