#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "paracalc/symbols.hpp"

namespace paracalc {

// T_a u = sum_j S_{j-3} a Delta_j u (S_k = 0 for k < 0). a has 1 column (scalar) or m*m columns (matrix).
GridFunction paraproduct(const GridFunction& a, const GridFunction& u);
// R(a,u) = sum_{|j-k|<=2} Delta_j a Delta_k u, so that a u = T_a u + T_u a + R(a,u) exactly (scalar a, u).
GridFunction bony_remainder(const GridFunction& a, const GridFunction& u);

// sigma(x,D)u by the factorized quadrature.
GridFunction apply_paradiff(const SymbolSlice& sigma, const GridFunction& u);
GridFunction apply_paradiff(const Symbol& sigma, double t, const GridFunction& u);
// Dense matrix of sigma(x,D) built entry by entry from the defining sum, with sigma(x,k) taken from
// Symbol::field (the direct psi(eta,xi) filter, independent of the factorized path). Rows and columns
// are ordered component-major: index c*N + n. Intended for small N.
MatrixXcd paradiff_matrix(const Symbol& sigma, double t);

// True when every x-spectrum of sigma(., xi) sits inside |eta| <= eps2 (1+|xi|) (checked for a few xi).
bool spectrally_admissible(const Symbol& sigma, double t, double eps2, double tol = 1e-10);

using LinearOperator = std::function<GridFunction(const GridFunction&)>;

// Dense matrix of a linear operator, column by column on the unit basis (same ordering as above).
MatrixXcd dense_matrix(const LinearOperator& P, Index n, Index m);
GridFunction apply_dense(const MatrixXcd& M, const GridFunction& u);

// Probe coefficient 1 + 0.5 sum_{i=0}^{j_max-1} (offset+i) 2^-i cos(2^i x + phi_i): LL, every octave populated.
// With offset 5 the block i = j-4 met by frequency 2^j under psi_{-3} carries the factor (1+j), so the
// log weight of the target norm is matched at every scale instead of only asymptotically.
GridFunction probe_ll_coefficient(Index n, std::uint64_t seed, double offset = 5.0);

struct OperatorProbeReport {
    std::string name;
    double claimed_m = 0.0;
    double claimed_delta = 0.0;
    double s = 0.0;
    double alpha = 0.0;
    std::vector<int> scales;
    std::vector<double> ratios;
    double log_compensation = 0.0;  // ratios divided by (1+j)^c before the fit
    double fitted_slope = 0.0;
    double tol = 0.1;
    bool verdict = false;
    bool vanishes = false;
    bool gated = true;
    std::string note;
};

struct ProbeOptions {
    Index n = 1024;
    Index components = 1;
    int j_lo = 3;
    int j_hi = 0;  // 0: j_max of the grid
    int tests_per_scale = 5;
    std::uint64_t seed = 0;
    double tol = 0.1;
    double remainder_tol = 0.15;  // secondary claims inside one probe (T_a - T~_a)
    bool compensate = false;      // divide ratios by (1+j)^delta before the fit
    bool upper_bound = false;     // verdict slope <= tol instead of |slope| <= tol
};

const std::vector<SobolevIndex>& default_probe_indices();

// One report per (s, alpha); P is applied once per test function and reused for every index.
std::vector<OperatorProbeReport> operator_order_suite(const LinearOperator& P, double m, double delta,
                                                      const std::vector<SobolevIndex>& indices,
                                                      const ProbeOptions& opt);
OperatorProbeReport operator_order_fit(const LinearOperator& P, double m, double delta, double s, double alpha,
                                       const ProbeOptions& opt);

// Worst report (largest |slope| - tol) summarizing a suite.
OperatorProbeReport worst_of(const std::vector<OperatorProbeReport>& reports);

// ---- named probes -----------------------------------------------------------

LinearOperator paradiff_operator(const Symbol& a, double t = 0.0);

std::vector<OperatorProbeReport> action_probe(const Symbol& a, const ProbeOptions& opt,
                                              const std::vector<SobolevIndex>& idx = default_probe_indices());
std::vector<OperatorProbeReport> cutoff_independence_probe(const Symbol& a, const AdmissibleCutoff& psi1,
                                                           const AdmissibleCutoff& psi2, const ProbeOptions& opt,
                                                           const std::vector<SobolevIndex>& idx = default_probe_indices());
// T_a T_b - T_{ab}; with tilde: T~_a T~_b - T_{a~ b~} at time t.
std::vector<OperatorProbeReport> composition_remainder_probe(const Symbol& a, const Symbol& b, const ProbeOptions& opt,
                                                             bool tilde = false, double t = 0.0,
                                                             const std::vector<SobolevIndex>& idx = default_probe_indices());
// (T_a)^* - T_{a*}, with (T_a)^* from the dense operator matrix (N <= 1024).
std::vector<OperatorProbeReport> adjoint_remainder_probe(const Symbol& a, const ProbeOptions& opt,
                                                         const std::vector<SobolevIndex>& idx = default_probe_indices());

// D u = a d^eta u - T_a d^eta u with T_a the Bony paraproduct.
GridFunction paralin_residual(const GridFunction& a, const GridFunction& u, int deriv_order);
// Above the Holder threshold D maps H^{s+alpha log} into H^{(s-m+gamma)+(alpha+rho) log} for s in (m-gamma, m).
std::vector<OperatorProbeReport> paralin_probe(const GridFunction& a, double gamma, double rho, int deriv_order,
                                               const std::vector<SobolevIndex>& idx, const ProbeOptions& opt);

struct TimeCommutatorReport {
    double identity_residual = 0.0;  // relative max-norm residual of [d_t, T~_a] u = T_{d_t a~} u
    std::vector<OperatorProbeReport> commutator_order;  // T_{d_t a~}: order m + (delta+1) log
    std::vector<OperatorProbeReport> tilde_difference;  // T_a - T~_a: order (m-1) + (delta+1) log
};
TimeCommutatorReport time_commutator_probe(const Symbol& a, double t, const ProbeOptions& opt,
                                           const std::vector<SobolevIndex>& idx = default_probe_indices());

}  // namespace paracalc
