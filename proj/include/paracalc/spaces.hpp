#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "paracalc/grid.hpp"

namespace paracalc {

struct SobolevIndex {
    double s = 0.0;
    double alpha = 0.0;

    SobolevIndex() = default;
    SobolevIndex(double s_, double alpha_ = 0.0);
};

// log(2+|k|)^alpha (1+k^2)^{s/2}
double log_sobolev_weight(double k, const SobolevIndex& idx);
VectorXd log_sobolev_weights(Index n, const SobolevIndex& idx);

double log_sobolev_norm(const GridFunction& u, const SobolevIndex& idx);

constexpr double kInf = std::numeric_limits<double>::infinity();

// l^r over j of 2^{js} (1+j)^alpha ||Delta_j u||_{L^p}, p in {2, inf}, r in {1, 2, inf}.
double log_besov_norm(const GridFunction& u, double s, double alpha, double p, double r);

// Dyadic form of the log-Sobolev norm: (sum 2^{2js}(1+j)^{2alpha} ||Delta_j u||^2)^{1/2}.
inline double dyadic_sobolev_norm(const GridFunction& u, const SobolevIndex& idx) {
    return log_besov_norm(u, idx.s, idx.alpha, 2.0, 2.0);
}

struct RegularitySeminorms {
    double linf = 0.0;
    double ll_x = 0.0;
    double ll_t = 0.0;
    double holder_gamma = 0.0;  // 0 when not applicable
    double holder_k2 = 0.0;
};

// sup over grid pairs with periodic distance d < 1 of |f(y)-f(z)| / (d log(1 + 1/d)).
double ll_seminorm_direct(const GridFunction& f);
// Same on a uniformly sampled path over an interval (no wrap-around).
double ll_seminorm_path(const VectorXd& values, double dt);
// sup over pairs with d < 1 of |f(y)-f(z)| / d^gamma.
double holder_seminorm_direct(const GridFunction& f, double gamma);
// Lipschitz quotient restricted to separations 2^-j (used to show LL is not Lipschitz).
double difference_quotient_at(const GridFunction& f, double separation);

struct DyadicLL {
    double value = 0.0;     // max_k 2^k ||Delta_k f||_inf / (k+1)
    double tail = 0.0;      // max_k 2^k ||f - S_k f||_inf / (k+1)
    double lipschitz = 0.0; // max_k (||S_k f||_inf + ||d S_k f||_inf) / (k+1)
};
DyadicLL ll_seminorm_dyadic(const GridFunction& f);

// f = sum_{j=1..J} (1+j) 2^-j cos(2^j x + phi_j), phi_j = 2pi mix(seed,j)/2^64
GridFunction gen_ll_function(Index n, std::uint64_t seed, int n_terms);
// f = sum_{j=1..J} 2^{-gamma j} cos(2^j x + phi_j)
GridFunction gen_holder_function(Index n, double gamma, std::uint64_t seed, int n_terms);

struct TimePath {
    double t_end = 1.0;
    VectorXd values;  // samples at t_l = l * t_end / (n-1)

    Index samples() const { return values.size(); }
    double dt() const { return t_end / double(values.size() - 1); }
    double time(Index l) const { return double(l) * dt(); }
    double at(double t) const;  // linear interpolation, constant beyond the ends
};

// Same lacunary series in t; terms J with 2^J well below the sampling rate.
TimePath gen_ll_time_coefficient(std::uint64_t seed, int n_terms, Index n_t, double t_end = 1.0);
double ll_time_value(std::uint64_t seed, int n_terms, double t);
// All phases aligned at t_star: sum_j 2^-j ((1+j) cos(2^j (t-t*)) + sin(2^j (t-t*))). Still LL, and at t*
// both |a - a_eps| ~ eps log(1/eps) and |d_t a_eps| ~ log(1/eps) are attained.
TimePath gen_ll_time_peaked(int n_terms, Index n_t, double t_end, double t_star);

enum class CoefficientClass { Constant, Holder, LogLipschitz };

// Band-limited seeded test functions: random spectrum on the ring of block j, plus single modes
// spread across the ring (the worst case for products at negative s).
std::vector<GridFunction> dyadic_test_set(Index n, int j, int n_random, std::uint64_t seed,
                                          bool with_modes = true);

struct ProductProbeTable {
    std::vector<int> scales;
    std::vector<double> ratios;       // max ||(S_j a) u|| / ||u|| over test functions at scales <= j
    std::vector<double> compensated;  // ratios / (1+j)^c
    double log_compensation = 0.0;
    double last_octave_slope = 0.0;
    bool bounded = false;
};

// u -> (S_j a) u measured on H^{s+alpha log}, j = 1..J <= j_max-1, so every product stays alias-free.
ProductProbeTable product_probe(const GridFunction& a, CoefficientClass cls, const SobolevIndex& idx,
                                int max_scale, std::uint64_t seed, int n_random = 5);

}  // namespace paracalc
