#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "paracalc/spaces.hpp"
#include "paracalc/symbols.hpp"

namespace paracalc {

enum class OperatorKind { NonConservative, Conservative };

// t -> real field on the grid: N x m*m (row-major block) for matrices, N x m for vectors.
using FieldFn = std::function<MatrixXd(double)>;

// L u = d_t u + A(t,x) d_x u + B(t,x) u (non-conservative) or d_t u + d_x(A u) + B u (conservative); L u = f.
struct HyperbolicSystem {
    std::string name;
    Index n = 0;
    Index m = 1;
    OperatorKind kind = OperatorKind::NonConservative;
    FieldFn A;
    FieldFn B;  // empty: B = 0
    FieldFn f;  // empty: f = 0
    bool t_dependent = false;
    RegularitySeminorms reg;  // declared K0, K1 (x and t), K2, gamma

    MatrixXd a_field(double t) const { return A(t); }
    MatrixXd b_field(double t) const;
    MatrixXd forcing(double t) const;
    MatrixXd a_at(double t, Index x) const;
    MatrixXd b_at(double t, Index x) const;
};

// Coefficient specification shared with the scenario files.
struct SystemSpec {
    std::string preset = "constant";  // constant | smooth | ll_x | ll_t | ll_tx | wave | wave_ll_x | wave_lipschitz_t | eigenframe_ll_t
    Index n = 256;
    Index m = 1;
    MatrixXd a0;              // base matrix for scalar-modulated presets (default identity)
    double amp = 0.0;         // modulation amplitude
    std::uint64_t seed = 0;
    int terms = 6;            // lacunary terms
    double holder_gamma = 0.0;  // > 0 adds B = b_amp h_gamma(x) Id
    double b_amp = 0.0;
    MatrixXd b0;              // constant B (optional)
    OperatorKind kind = OperatorKind::NonConservative;
};

HyperbolicSystem make_system(const SystemSpec& spec);

// A(t,x) = c(t,x) a0 for a scalar modulation c.
HyperbolicSystem modulated_system(Index n, const MatrixXd& a0, std::function<VectorXd(double)> c, bool t_dependent,
                                  const std::string& name);
// A = [[0, a], [1, 0]], eigenvalues +-sqrt(a): the first-order reduction of u_tt = a u_xx.
HyperbolicSystem wave_reduction(Index n, std::function<VectorXd(double)> a, bool t_dependent, const std::string& name);
// A(t) = R(t) diag(1,-1) R(t)^-1, R columns (cos th_i, sin th_i), th_1 = pi/4 + g(t), th_2 = 3pi/4 - g(t).
HyperbolicSystem eigenframe_system(Index n, std::function<double(double)> g, const std::string& name);

// Measured K0, K1 (x: direct LL over the grid at the given times; t: LL over the sampled times at every x), K2.
RegularitySeminorms measure_regularity(const HyperbolicSystem& sys, const std::vector<double>& times,
                                       double holder_gamma = 0.0);
// Declared bounds dominate the measured ones (factor 1.05).
bool regularity_consistent(const HyperbolicSystem& sys, const std::vector<double>& times);

// Principal symbol xi A(t,x).
MatrixXcd principal_symbol(const HyperbolicSystem& sys, double t, Index x, double k);

struct SampleSet {
    std::vector<double> times = {0.0};
    std::vector<Index> points;  // empty: every grid point
};

struct HyperbolicityReport {
    std::vector<double> eigenvalues;  // real parts, every sample, ascending per sample
    double max_imag = 0.0;
    double min_gap = 0.0;
    bool verdict = false;
};
HyperbolicityReport check_hyperbolic(const HyperbolicSystem& sys, const SampleSet& samples);

struct Symmetrizer {
    Index n = 0;
    Index m = 1;
    bool t_dependent = false;
    std::function<MatrixXcd(double)> field;  // t -> N x m*m Hermitian field (independent of sign(xi))
    double lambda = 0.0;
    double Lambda = 0.0;

    MatrixXcd at(double t, Index x, double xi_sign = 1.0) const;
    Symmetrizer scaled(double c) const;
    // Samples on a uniform time grid for the tilde smoothing.
    CoefficientPath path(double t_end, Index n_t) const;
};

// Identity symmetrizer for symmetric systems.
Symmetrizer identity_symmetrizer(Index n, Index m);
// S = (R^-1)^* R^-1 with unit eigenvectors (first nonzero entry positive), eigenvalues ascending.
// Throws when the eigenvalue gap falls below 1e-6 |A| on any sample.
Symmetrizer build_symmetrizer(const HyperbolicSystem& sys, const SampleSet& samples);

struct SymmetrizerReport {
    double hermitian_residual = 0.0;    // |S - S^*|
    double positivity_residual = 0.0;   // violation of lambda <= S <= Lambda
    double symmetrizing_residual = 0.0; // |S A - (S A)^*| / |A|
    double homogeneity_residual = 0.0;  // S carries no xi dependence by construction, so this stays 0
    double lambda = 0.0;
    double Lambda = 0.0;
    double ll_x = 0.0;  // largest LL seminorm in x of the entries of S
    double ll_t = 0.0;  // largest LL seminorm in t of the entries (0 for t-constant S)
    double max_residual() const;
};
SymmetrizerReport verify_symmetrizer(const Symmetrizer& S, const HyperbolicSystem& sys, const SampleSet& samples);

}  // namespace paracalc
