#pragma once

#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace paracalc {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Periodic field on the 2pi grid x_n = 2pi n / N. One column per component.
struct GridFunction {
    MatrixXcd values;

    GridFunction() = default;
    explicit GridFunction(MatrixXcd v) : values(std::move(v)) {}
    GridFunction(Index n, Index m) : values(MatrixXcd::Zero(n, m)) {}

    Index size() const { return values.rows(); }
    Index components() const { return values.cols(); }
    auto component(Index c) { return values.col(c); }
    auto component(Index c) const { return values.col(c); }

    GridFunction& operator+=(const GridFunction& o) { values += o.values; return *this; }
    GridFunction& operator-=(const GridFunction& o) { values -= o.values; return *this; }
    GridFunction& operator*=(cplx s) { values *= s; return *this; }
};

inline GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
inline GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
inline GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

// Unitary Fourier coefficients, stored in FFT order (k = 0..N/2-1, -N/2..-1).
//   c_k = sqrt(2pi)/N sum_n u_n e^{-i k x_n},  u_n = (2pi)^{-1/2} sum_k c_k e^{i k x_n}
// so the discrete L2 norm sqrt(2pi/N sum |u_n|^2) equals the l2 norm of c.
struct SpectralCoeffs {
    MatrixXcd coeffs;

    Index size() const { return coeffs.rows(); }
    Index components() const { return coeffs.cols(); }
    cplx at(long k, Index comp = 0) const;
};

bool valid_grid_size(Index n);
void require_grid_size(Index n);

// Integer frequency held at storage index i.
inline long freq(Index i, Index n) { return i < n / 2 ? long(i) : long(i) - long(n); }
inline Index freq_index(long k, Index n) { return k >= 0 ? Index(k) : Index(k + long(n)); }
VectorXd frequencies(Index n);
VectorXd grid_points(Index n);

SpectralCoeffs to_spectral(const GridFunction& u);
GridFunction from_spectral(const SpectralCoeffs& c);

// Raw unnormalized transforms on a single column (forward: sum u e^{-ikx}).
VectorXcd fft(const VectorXcd& u);
VectorXcd ifft(const VectorXcd& c);  // includes the 1/N

// Diagonal multiplier w(k) given in FFT order, applied to every component.
GridFunction apply_weights(const GridFunction& u, const VectorXcd& w);
GridFunction apply_weights(const GridFunction& u, const VectorXd& w);
VectorXcd weights_from(Index n, const std::function<cplx(double)>& w);

// Matrix multiplier: output spectrum is w(k) * u^(k).
GridFunction apply_multiplier(const GridFunction& u, const std::function<MatrixXcd(double)>& w);
GridFunction apply_multiplier(const GridFunction& u, const std::function<cplx(double)>& w);

GridFunction derivative(const GridFunction& u, int order = 1);

// Pointwise m x m matrix field (row-major block: entry (r,c) is column r*m+c) times vector field.
GridFunction pointwise_apply(const MatrixXcd& field, const GridFunction& u);

double l2_norm(const GridFunction& u);
double sup_norm(const GridFunction& u);
double max_abs_diff(const GridFunction& a, const GridFunction& b);

GridFunction sample(Index n, const std::function<cplx(double)>& f);
GridFunction constant_field(Index n, cplx c, Index m = 1);
GridFunction mode(Index n, long k, cplx amplitude = 1.0);

bool is_real(const GridFunction& u, double tol = 1e-12);

}  // namespace paracalc
