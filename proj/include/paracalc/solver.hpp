#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "paracalc/energy.hpp"
#include "paracalc/systems.hpp"
#include "paracalc/trajectory.hpp"

namespace paracalc {

// Raised by the CFL and NaN guards; the CLI maps it to its own exit code.
struct NumericalGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    double cfl = 0.4;
    double dt = 0.0;  // 0: largest dt allowed by the CFL bound
    double t_end = 1.0;
    bool dealias = true;  // 2/3 rule
    int record_stride = 1;
};

// -A d_x u - B u + f (non-conservative) or -d_x(A u) - B u + f (conservative), spectral d_x.
GridFunction rhs(const HyperbolicSystem& sys, double t, const GridFunction& u, bool dealias = true);

// Bound used for the CFL rule: max row norm of A over the declared K0 and 65 samples of [0, t_end], times 1.05.
double coefficient_bound(const HyperbolicSystem& sys, double t_end);
double cfl_step(const HyperbolicSystem& sys, const SolverConfig& cfg);

// Classical RK4; coefficients are evaluated in closed form at the stage times. The observer sees every
// recorded state (stride and the final time), in order.
using Observer = std::function<void(double, const GridFunction&)>;
void evolve(const HyperbolicSystem& sys, const GridFunction& u0, const SolverConfig& cfg, const Observer& observe);
Trajectory evolve(const HyperbolicSystem& sys, const GridFunction& u0, const SolverConfig& cfg);

// (1 + eps k^2)^{-1/2}
GridFunction j_epsilon(const GridFunction& u, double eps);

struct CommutatorReport {
    std::vector<double> eps;
    std::vector<double> norms;  // ||g_eps||_{H^s}
    double ratio = 0.0;         // last / first
    double rate = 0.0;          // least-squares slope of log2 norm against log2 eps
    bool monotone = false;      // non-increasing as eps falls, within 5%
    bool verdict = false;       // monotone and ratio <= 1e-2 (or identically zero)
};

// g_eps = [A, J_eps] d_x u + [B, J_eps] u at time t, eps = 2^-2 .. 2^-12.
CommutatorReport commutator_probe(const HyperbolicSystem& sys, const GridFunction& u, double s = 0.0, double t = 0.0,
                                  std::vector<double> eps = {});

struct LossConfig {
    int j_lo = 3;
    int j_hi = 8;
    double s = 0.9;
    double fit_from = 0.2;     // fit only t >= fit_from * T
    double top_fraction = 0.5; // beta_hat from the top part of the j range
    int records = 192;         // records per packet run
};

struct PacketFit {
    int j = 0;
    double rate = 0.0;  // slope of g_j(t) = log2(||u(t)||_{H^s} / ||u0||_{H^s}) in t over the fit window
    double intercept = 0.0;
    double corr = 0.0;
    std::vector<double> times, g;
};

struct LossReport {
    std::vector<PacketFit> fits;
    double beta_hat = 0.0;      // slope of the rates against j over the top part
    double beta_hat_all = 0.0;  // same over every j
    double min_corr = 0.0;      // over the top part
    std::vector<Trajectory> runs;
};

// Single-mode packets e^{i 2^j x} on the first component, run in parallel.
LossReport loss_experiment(const HyperbolicSystem& sys, const LossConfig& lc, const SolverConfig& cfg);

struct GronwallFit {
    double C1 = 1.0;
    double C2 = 0.0;
};

// Fits (C1, C2) on packet runs [first, last) for the refined left-hand side at loss rate beta:
// C2 = largest positive growth rate of its log, C1 = exp(max(log ratio - C2 t)).
GronwallFit fit_gronwall(const LossReport& rep, double s, double beta, std::size_t first = 0,
                         std::size_t last = std::size_t(-1));

struct GronwallSweep {
    std::vector<GronwallReport> per_packet;
    double margin = 0.0;  // worst refined margin
    bool verdict = false;
};
GronwallSweep gronwall_sweep(const LossReport& rep, double s, double beta, const GronwallFit& fit);

// CSV exports: (t, x_index, component, re, im); (t, j, block_l2); (j, t, g, rate, corr).
void write_trajectory_csv(const std::string& path, const Trajectory& run);
void write_spectral_summary_csv(const std::string& path, const Trajectory& run);
void write_loss_csv(const std::string& path, const LossReport& rep);

}  // namespace paracalc
