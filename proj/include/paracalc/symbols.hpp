#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "paracalc/dyadic.hpp"
#include "paracalc/spaces.hpp"

namespace paracalc {

// ---- admissible cutoff -----------------------------------------------------

// psi(eta, xi) = sum_k chi(2^{-(k+shift)} eta) phi_k(xi), phi_0 = chi. shift = -3 is psi_{-3}.
struct AdmissibleCutoff {
    int shift = -3;
    double eps1 = 0.0;  // measured: psi == 1 for |eta| <= eps1 (1+|xi|)
    double eps2 = 0.0;  // measured: psi == 0 for |eta| >= eps2 (1+|xi|)

    double operator()(double eta, double xi) const;
    VectorXd eta_filter(int k, Index n) const;  // chi(2^{-(k+shift)} eta) in FFT order
};

AdmissibleCutoff make_cutoff(int shift, const DyadicPartition& part);
inline AdmissibleCutoff make_psi_minus3(const DyadicPartition& part) { return make_cutoff(-3, part); }

// ---- time mollifier --------------------------------------------------------

// rho(t) = c exp(-1/(1-t^2)) on (-1,1); c fixed by a 401-node trapezoid rule.
double mollifier_constant();
double mollifier(double t);
double mollifier_derivative(double t);

// Normalized discrete convolution weights on a uniform sample grid, constant extension past the ends:
//   a_eps(t) = sum_l rho_eps(t - s_l) a_l / sum_l rho_eps(t - s_l)
struct KernelWeights {
    std::vector<Index> index;
    std::vector<double> value;
    std::vector<double> deriv;  // weights of d/dt a_eps
};
KernelWeights kernel_weights(double t, double eps, Index n_samples, double dt);

// ---- coefficient paths -----------------------------------------------------

// Matrix field over (t, x): N rows, m*m columns (row-major block), summed from separable pieces g(t) F(x)
// and optional dense time samples. Everything downstream is linear in the time factor.
class CoefficientPath {
public:
    CoefficientPath() = default;

    static CoefficientPath constant(const MatrixXcd& field);
    static CoefficientPath separable(const TimePath& g, const MatrixXcd& field);
    static CoefficientPath sampled(std::vector<MatrixXcd> samples, double t_end);

    CoefficientPath& operator+=(const CoefficientPath& o);
    CoefficientPath scaled(cplx c) const;

    Index rows() const { return rows_; }
    Index blocks() const { return cols_; }
    bool empty() const { return pieces_.empty() && dense_.empty(); }
    bool t_constant() const;
    bool x_constant(double tol = 0.0) const;
    double finest_dt() const;  // +inf when t-constant
    double t_end() const;

    MatrixXcd value(double t) const;  // linear interpolation of samples
    MatrixXcd mollified(double t, double eps, bool derivative = false) const;

private:
    struct Piece {
        std::optional<TimePath> g;
        MatrixXcd field;
    };
    void check_shape(Index r, Index c);

    Index rows_ = 0, cols_ = 0;
    std::vector<Piece> pieces_;
    std::vector<MatrixXcd> dense_;
    double dense_t_end_ = 0.0;
};

// Helpers to build N x m^2 fields.
MatrixXcd constant_matrix_field(Index n, const MatrixXcd& a);
MatrixXcd scalar_matrix_field(const GridFunction& f, const MatrixXcd& a);  // f(x) * a

// ---- symbols ---------------------------------------------------------------

enum class XClass { Linf, LL, HolderLog };
struct XRegularity {
    XClass kind = XClass::Linf;
    double gamma = 0.0;
    double rho = 0.0;
};
enum class TClass { Linf, LL };
enum class TimeSmoothing { None, Fixed, Tilde };

struct SymbolTerm {
    CoefficientPath coef;
    std::function<cplx(double)> weight;  // scalar multiplier w(xi)
    // Optional pointwise map applied to the (time-smoothed) field before spatial smoothing,
    // e.g. a per-sample matrix square root. Makes the term nonlinear in coef.
    std::function<MatrixXcd(const MatrixXcd&)> post_map;
    // Frozen per-band fields (index = tilde band); when set they replace coef and the term is t-constant.
    std::vector<MatrixXcd> band_fields;
};

struct Symbol {
    Index n = 0;
    Index m = 1;
    double order_m = 0.0;
    double order_delta = 0.0;
    XRegularity x_class;
    TClass t_class = TClass::Linf;
    std::vector<SymbolTerm> terms;

    std::optional<AdmissibleCutoff> cutoff;  // set by smooth_symbol
    TimeSmoothing time_mode = TimeSmoothing::None;
    double eps = 0.0;         // for TimeSmoothing::Fixed
    bool d_dt = false;        // time derivative of the smoothed symbol

    double t_end() const;
    Index n_t() const;  // samples of the finest time-dependent piece (1 if t-constant)
    bool t_constant() const;

    // Coefficient field used at frequency xi (time smoothing and post map applied, no x-smoothing).
    MatrixXcd raw_field(std::size_t term, double t, double xi) const;
    // Full symbol at frequency xi as an N x m^2 field over x.
    MatrixXcd field(double t, double xi) const;
    MatrixXcd eval(double t, Index x_index, double xi) const;
};

Symbol make_symbol(Index n, Index m, double order_m, double order_delta);
void add_term(Symbol& a, CoefficientPath coef, std::function<cplx(double)> weight);

// Scalar conveniences: w(xi) alone, c(x) w(xi), and g(t) c(x) w(xi).
Symbol multiplier_symbol(Index n, std::function<cplx(double)> w, double order_m, double order_delta);
Symbol scalar_symbol(const GridFunction& c, std::function<cplx(double)> w, double order_m, double order_delta,
                     XClass cls = XClass::LL);
Symbol separable_symbol(const TimePath& g, const GridFunction& c, std::function<cplx(double)> w, double order_m,
                        double order_delta);

// Frequency band used by the tilde construction: 0 for |xi| <= 1, else round(log2|xi|), capped at j_max.
int tilde_band(double xi, int j_max);
inline double tilde_eps(int band) { return std::ldexp(1.0, -band); }

// seminorm table: entry alpha = sup_xi (1+|xi|)^{-m+alpha} log^{-delta}(2+|xi|) ||d_xi^alpha a(.,xi)||_X
// sampled over the given times and every grid frequency with |xi| <= xi_max (0: resolved range).
std::vector<double> symbol_seminorm(const Symbol& a, int k_max, const std::vector<double>& times = {0.0},
                                    long xi_max = 0);

Symbol smooth_symbol(const Symbol& a, const AdmissibleCutoff& psi);
Symbol mollify_time(const Symbol& a, double eps);
Symbol tilde_symbol(const Symbol& a);
Symbol time_derivative(const Symbol& a);

// a frozen at time t: t-constant symbol with the time smoothing baked in (per band for tilde symbols).
Symbol freeze(const Symbol& a, double t);
// Pointwise product of symbols frozen at time t (orders add). Cutoffs are dropped: smooth the result.
Symbol multiply(const Symbol& a, const Symbol& b, double t = 0.0);
// a*(x, xi): conjugate transpose of every sample.
Symbol adjoint_symbol(const Symbol& a);

// max |sigma_{a~} - (sigma_a)~| over x, the given frequencies and times, both paths computed explicitly.
double commutation_check(const Symbol& a, const AdmissibleCutoff& psi, const std::vector<double>& times,
                         const std::vector<double>& xis);

// Symbol frozen at one time: per-term, per-band fields and their x-smoothed versions.
class SymbolSlice {
public:
    SymbolSlice(const Symbol& a, double t);

    Index size() const { return n_; }
    Index components() const { return m_; }
    MatrixXcd eval(Index x_index, double xi) const;
    // (sigma(x,D)u)(x) = (2pi)^{-1/2} sum_k e^{ikx} sigma(x,k) u^(k), grouped by dyadic block.
    GridFunction apply(const GridFunction& u) const;

private:
    struct Part {
        std::size_t term;
        int band;                        // -1: all frequencies
        MatrixXcd field;                 // time-smoothed field
        std::vector<MatrixXcd> smoothed; // per dyadic k (cutoff only)
    };
    Index n_, m_;
    int j_max_;
    std::vector<Part> parts_;
    std::vector<std::function<cplx(double)>> weights_;
    std::optional<AdmissibleCutoff> cutoff_;
};

}  // namespace paracalc
