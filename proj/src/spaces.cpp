#include "paracalc/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "paracalc/dyadic.hpp"
#include "paracalc/rng.hpp"

namespace paracalc {

SobolevIndex::SobolevIndex(double s_, double alpha_) : s(s_), alpha(alpha_) {
    if (!std::isfinite(s) || !std::isfinite(alpha) || std::abs(s) > 10.0 || std::abs(alpha) > 10.0)
        throw std::invalid_argument("Sobolev index outside |s|,|alpha| <= 10");
}

double log_sobolev_weight(double k, const SobolevIndex& idx) {
    return std::pow(std::log(2.0 + std::abs(k)), idx.alpha) * std::pow(1.0 + k * k, 0.5 * idx.s);
}

VectorXd log_sobolev_weights(Index n, const SobolevIndex& idx) {
    VectorXd w(n);
    for (Index i = 0; i < n; ++i) w(i) = log_sobolev_weight(double(freq(i, n)), idx);
    return w;
}

double log_sobolev_norm(const GridFunction& u, const SobolevIndex& idx) {
    const SpectralCoeffs c = to_spectral(u);
    const VectorXd w = log_sobolev_weights(u.size(), idx);
    double acc = 0.0;
    for (Index i = 0; i < c.size(); ++i) acc += w(i) * w(i) * c.coeffs.row(i).squaredNorm();
    return std::sqrt(acc);
}

double log_besov_norm(const GridFunction& u, double s, double alpha, double p, double r) {
    if (!(p == 2.0 || p == kInf)) throw std::invalid_argument("Besov p must be 2 or inf");
    if (!(r == 1.0 || r == 2.0 || r == kInf)) throw std::invalid_argument("Besov r must be 1, 2 or inf");
    const std::vector<GridFunction> blocks = dyadic_blocks(u);
    double acc = 0.0;
    for (int j = 0; j < int(blocks.size()); ++j) {
        const double lp = p == 2.0 ? l2_norm(blocks[j]) : sup_norm(blocks[j]);
        const double term = std::pow(2.0, j * s) * std::pow(1.0 + j, alpha) * lp;
        if (r == kInf)
            acc = std::max(acc, term);
        else if (r == 1.0)
            acc += term;
        else
            acc += term * term;
    }
    return r == 2.0 ? std::sqrt(acc) : acc;
}

namespace {

double ll_modulus(double d) { return d * std::log(1.0 + 1.0 / d); }

template <class Quotient>
double pair_sup(const GridFunction& f, Quotient q) {
    const Index n = f.size();
    const double h = kTwoPi / double(n);
    double best = 0.0;
    for (Index off = 1; off <= n / 2; ++off) {
        const double d = h * double(off);  // periodic distance for offsets up to n/2
        if (d >= 1.0) break;
        const double denom = q(d);
        for (Index i = 0; i < n; ++i) {
            const Index k = (i + off) % n;
            best = std::max(best, (f.values.row(i) - f.values.row(k)).norm() / denom);
        }
    }
    return best;
}

}  // namespace

double ll_seminorm_direct(const GridFunction& f) { return pair_sup(f, ll_modulus); }

double holder_seminorm_direct(const GridFunction& f, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma outside (0,1]");
    return pair_sup(f, [gamma](double d) { return std::pow(d, gamma); });
}

double ll_seminorm_path(const VectorXd& values, double dt) {
    const Index n = values.size();
    double best = 0.0;
    for (Index off = 1; off < n; ++off) {
        const double d = dt * double(off);
        if (d >= 1.0) break;
        const double denom = ll_modulus(d);
        for (Index i = 0; i + off < n; ++i)
            best = std::max(best, std::abs(values(i + off) - values(i)) / denom);
    }
    return best;
}

double difference_quotient_at(const GridFunction& f, double separation) {
    const Index n = f.size();
    const Index off = std::max<Index>(1, Index(std::llround(separation * double(n) / kTwoPi)));
    const double d = kTwoPi * double(off) / double(n);
    double best = 0.0;
    for (Index i = 0; i < n; ++i)
        best = std::max(best, (f.values.row(i) - f.values.row((i + off) % n)).norm() / d);
    return best;
}

DyadicLL ll_seminorm_dyadic(const GridFunction& f) {
    DyadicPartition p(f.size());
    DyadicLL out;
    const GridFunction df = derivative(f);
    for (int k = 0; k <= p.top(); ++k) {
        const double scale = std::ldexp(1.0, k) / double(k + 1);
        out.value = std::max(out.value, scale * sup_norm(apply_weights(f, p.block(k))));
        out.tail = std::max(out.tail, scale * sup_norm(f - apply_weights(f, p.low(k))));
        const double lip = sup_norm(apply_weights(f, p.low(k))) + sup_norm(apply_weights(df, p.low(k)));
        out.lipschitz = std::max(out.lipschitz, lip / double(k + 1));
    }
    return out;
}

namespace {

GridFunction lacunary(Index n, int n_terms, std::uint64_t seed, const std::function<double(int)>& amp) {
    require_grid_size(n);
    if (n_terms < 1 || n_terms > j_max_for(n) - 1)
        throw std::invalid_argument("number of lacunary terms must lie in [1, j_max-1] (got " +
                                    std::to_string(n_terms) + ")");
    GridFunction f(n, 1);
    const VectorXd x = grid_points(n);
    for (int j = 1; j <= n_terms; ++j) {
        const double a = amp(j), ph = phase(seed, std::uint64_t(j)), freq_j = std::ldexp(1.0, j);
        for (Index i = 0; i < n; ++i) f.values(i, 0) += a * std::cos(freq_j * x(i) + ph);
    }
    return f;
}

}  // namespace

GridFunction gen_ll_function(Index n, std::uint64_t seed, int n_terms) {
    return lacunary(n, n_terms, seed, [](int j) { return (1.0 + j) * std::ldexp(1.0, -j); });
}

GridFunction gen_holder_function(Index n, double gamma, std::uint64_t seed, int n_terms) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma outside (0,1)");
    return lacunary(n, n_terms, seed, [gamma](int j) { return std::pow(2.0, -gamma * j); });
}

double TimePath::at(double t) const {
    if (t <= 0.0) return values(0);
    if (t >= t_end) return values(values.size() - 1);
    const double pos = t / dt();
    const Index l = std::min<Index>(Index(pos), values.size() - 2);
    const double w = pos - double(l);
    return (1.0 - w) * values(l) + w * values(l + 1);
}

double ll_time_value(std::uint64_t seed, int n_terms, double t) {
    double v = 0.0;
    for (int j = 1; j <= n_terms; ++j)
        v += (1.0 + j) * std::ldexp(1.0, -j) * std::cos(std::ldexp(1.0, j) * t + phase(seed, std::uint64_t(j)));
    return v;
}

TimePath gen_ll_time_coefficient(std::uint64_t seed, int n_terms, Index n_t, double t_end) {
    if (n_t < 2 || !(t_end > 0.0)) throw std::invalid_argument("time path needs n_t >= 2 and T > 0");
    if (n_terms < 1) throw std::invalid_argument("need at least one lacunary term");
    TimePath p;
    p.t_end = t_end;
    p.values.resize(n_t);
    for (Index l = 0; l < n_t; ++l) p.values(l) = ll_time_value(seed, n_terms, p.time(l));
    return p;
}

TimePath gen_ll_time_peaked(int n_terms, Index n_t, double t_end, double t_star) {
    if (n_t < 2 || !(t_end > 0.0)) throw std::invalid_argument("time path needs n_t >= 2 and T > 0");
    if (n_terms < 1) throw std::invalid_argument("need at least one lacunary term");
    TimePath p;
    p.t_end = t_end;
    p.values.resize(n_t);
    for (Index l = 0; l < n_t; ++l) {
        const double d = p.time(l) - t_star;
        double v = 0.0;
        for (int j = 1; j <= n_terms; ++j) {
            const double w = std::ldexp(1.0, j);
            v += ((1.0 + j) * std::cos(w * d) + std::sin(w * d)) / w;
        }
        p.values(l) = v;
    }
    return p;
}

std::vector<GridFunction> dyadic_test_set(Index n, int j, int n_random, std::uint64_t seed, bool with_modes) {
    DyadicPartition p(n);
    const VectorXd ring = p.block(j);
    std::vector<GridFunction> out;
    SplitMix rng(derive_seed(seed, std::uint64_t(j)));
    for (int r = 0; r < n_random; ++r) {
        SpectralCoeffs c;
        c.coeffs.resize(n, 1);
        for (Index i = 0; i < n; ++i) {
            const double re = rng.normal(), im = rng.normal();
            c.coeffs(i, 0) = ring(i) * cplx(re, im);
        }
        out.push_back(from_spectral(c));
    }
    if (with_modes) {
        std::set<long> ks;
        if (j == 0) {
            ks = {0, 1};
        } else {
            const double base = std::ldexp(1.0, j);
            ks = {long(std::ceil(0.6 * base)), long(base), long(std::floor(1.8 * base))};
        }
        for (long k : ks) out.push_back(mode(n, k));
    }
    return out;
}

ProductProbeTable product_probe(const GridFunction& a, CoefficientClass cls, const SobolevIndex& idx,
                                int max_scale, std::uint64_t seed, int n_random) {
    const Index n = a.size();
    DyadicPartition p(n);
    if (max_scale < 2 || max_scale > p.j_max - 1)
        throw std::invalid_argument("product probe scale range must lie in [2, j_max-1]");
    std::vector<std::vector<GridFunction>> family;
    for (int i = 0; i <= max_scale; ++i) family.push_back(dyadic_test_set(n, i, n_random, seed));
    std::vector<std::vector<double>> base(family.size());
    for (std::size_t i = 0; i < family.size(); ++i)
        for (const auto& u : family[i]) base[i].push_back(log_sobolev_norm(u, idx));
    if (family.empty() || family[0].empty()) throw std::invalid_argument("empty test set");

    ProductProbeTable t;
    t.log_compensation = cls == CoefficientClass::LogLipschitz ? 1.0 : 0.0;
    for (int j = 1; j <= max_scale; ++j) {
        const GridFunction aj = apply_weights(a, p.low(j));
        double best = 0.0;
        for (int i = 0; i <= j; ++i)
            for (std::size_t q = 0; q < family[i].size(); ++q) {
                GridFunction prod(family[i][q].values.cwiseProduct(aj.values.col(0)));
                best = std::max(best, log_sobolev_norm(prod, idx) / base[i][q]);
            }
        t.scales.push_back(j);
        t.ratios.push_back(best);
        t.compensated.push_back(best / std::pow(1.0 + j, t.log_compensation));
    }
    const std::size_t last = t.compensated.size() - 1;
    t.last_octave_slope = std::log2(t.compensated[last] / t.compensated[last - 1]);
    t.bounded = t.last_octave_slope <= 0.05;
    return t;
}

}  // namespace paracalc
