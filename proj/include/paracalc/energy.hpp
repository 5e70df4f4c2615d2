#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "paracalc/paradiff.hpp"
#include "paracalc/symbols.hpp"
#include "paracalc/systems.hpp"
#include "paracalc/trajectory.hpp"

namespace paracalc {

// s(t) = s - beta t on [0, T*]; mu is the low-frequency cutoff scale.
struct EnergySchedule {
    double s = 0.5;
    double beta = 0.0;
    double T_star = 1.0;
    double mu = 2.0;
    OperatorKind kind = OperatorKind::NonConservative;
    double gamma = 1.0;  // regularity index used by the conservative lifespan rule

    double s_at(double t) const { return s - beta * t; }
    // beta T* < s (non-conservative), or s in (-gamma, 0) and beta T* < gamma + s (conservative); mu >= 2.
    void validate() const;
};

// theta(xi) = 1 on |xi| <= 1, 0 on |xi| >= 2, built from the same step as chi; theta_mu(xi) = theta(xi / mu).
double theta(double xi);
inline double theta_mu(double xi, double mu) { return theta(xi / mu); }
VectorXd theta_weights(Index n, double mu);  // FFT order

// Principal Hermitian square root of every m x m block of an N x m^2 field. Throws on a negative sample.
MatrixXcd hermitian_sqrt_field(const MatrixXcd& field, Index m);

// Sigma~ = (S~)^{1/2} (1 - theta_mu), smoothed with psi_{-3}. t-dependent S is sampled on n_t points of [0, t_end]
// (n_t = 0 picks the coarsest grid that resolves the smallest tilde band).
Symbol sigma_tilde(const Symmetrizer& S, double mu, double t_end = 1.0, Index n_t = 0);
// max over x of |Sigma~^2 - S~ (1-theta_mu)^2| at (t, xi), before the x-smoothing.
double sigma_square_residual(const Symbol& sigma, const Symmetrizer& S, double mu, double t, double xi);

struct EnergyValues {
    double E = 0.0;
    double E_log = 0.0;
};

// E_{s,alpha}[u] = ||T~_Sigma u||^2_{H^{s+alpha log}} + ||theta_mu(D) u||^2_{H^{s+alpha log}}.
class EnergyFunctional {
public:
    EnergyFunctional(const Symmetrizer& S, double mu, double t_end = 1.0, Index n_t = 0);

    double mu() const { return mu_; }
    const Symbol& sigma() const { return sigma_; }

    GridFunction apply_sigma(const GridFunction& u, double t) const;
    double quantity(const GridFunction& u, double t, const SobolevIndex& idx) const;
    // E and E_log at index s(t) and s(t) + 1/2 log.
    EnergyValues energy(const GridFunction& u, double t, const EnergySchedule& sched) const;

private:
    std::shared_ptr<const SymbolSlice> slice(double t) const;

    double mu_;
    Symbol sigma_;
    mutable std::mutex mu_cache_;
    mutable std::map<double, std::shared_ptr<const SymbolSlice>> cache_;
};

// Frozen calibration corpus: 20 seeded band-limited random fields and 20 dyadic packets, m components.
std::vector<GridFunction> calibration_corpus(Index n, Index m, std::uint64_t seed);

struct CalibrationResult {
    double mu = 0.0;
    double C_mu = 0.0;  // max ||u||_{H^{s+alpha log}} / E_{s,alpha}^{1/2}
    double C0 = 0.0;    // max E_{s,alpha}^{1/2} / ||u||_{H^{s+alpha log}}
    double threshold = 0.0;
    bool ok = false;
    std::vector<double> tried;
};

// Doubling search mu = 2, 4, ..., 2^10 until C_mu <= 2 / sqrt(min(lambda, 1)) across the corpus and the indices.
CalibrationResult calibrate_mu(const Symmetrizer& S, const std::vector<GridFunction>& corpus,
                               const std::vector<SobolevIndex>& indices = {{0.5, 0.0}, {0.5, 0.5}});

struct EnergyDerivativeReport {
    std::vector<double> times;  // interior record times
    std::vector<double> dE;     // centered differences
    std::vector<double> E, E_log, source;
    double C1 = 0.0;   // smallest C with dE/dt <= C E + source at every step
    double C23 = 0.0;  // smallest C with dE/dt <= C E_log + source at every step
};

// Source term: 2 E^{1/2} (||T~_Sigma Lu||_{H^{s(t)}} + ||theta_mu Lu||_{H^{s(t)}}).
EnergyDerivativeReport energy_derivative_probe(const Trajectory& run, const EnergyFunctional& energy,
                                               const EnergySchedule& sched);

struct GronwallReport {
    std::vector<double> times;
    std::vector<double> lhs, rhs;            // sup_{tau<=t} ||u||_{H^{s-beta tau}} vs C1 e^{C2 t}(...)
    std::vector<double> lhs_refined;         // adds (int_0^t ||u||^2_{H^{s-beta tau + 1/2 log}})^{1/2}
    double margin = 0.0;                     // min over t of (rhs - lhs) / rhs
    double margin_refined = 0.0;
    double worst_time = 0.0;
    bool verdict = false;
    bool verdict_refined = false;
};

GronwallReport gronwall_check(const Trajectory& run, const EnergySchedule& sched, double C1, double C2);

// d/dt ||v||^2_{H^{s(t)}} at fixed v by differentiating the weight: s'(t) sum log(1+k^2) (1+k^2)^{s(t)} |v^(k)|^2.
double norm_ladder_rate(const GridFunction& v, double s_t, double ds_dt);

// CSV with columns t, s(t), E, E_log, norm_Hs_t, margin.
void write_energy_csv(const std::string& path, const Trajectory& run, const EnergyFunctional& energy,
                      const EnergySchedule& sched, const GronwallReport& gronwall);

}  // namespace paracalc
