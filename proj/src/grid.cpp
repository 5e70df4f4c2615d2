#include "paracalc/grid.hpp"

#include <cmath>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace paracalc {

namespace {

Eigen::FFT<double>& fft_engine() {
    // kissfft caches twiddles per size; one engine per thread keeps it race-free
    thread_local Eigen::FFT<double> engine;
    return engine;
}

}  // namespace

bool valid_grid_size(Index n) {
    return n >= 16 && n <= 65536 && (n & (n - 1)) == 0;
}

void require_grid_size(Index n) {
    if (!valid_grid_size(n))
        throw std::invalid_argument("grid size must be a power of two in [16, 65536], got " +
                                    std::to_string(n));
}

cplx SpectralCoeffs::at(long k, Index comp) const {
    const Index n = size();
    if (k < -long(n) / 2 || k >= long(n) / 2) throw std::out_of_range("frequency outside grid");
    return coeffs(freq_index(k, n), comp);
}

VectorXd frequencies(Index n) {
    VectorXd k(n);
    for (Index i = 0; i < n; ++i) k(i) = double(freq(i, n));
    return k;
}

VectorXd grid_points(Index n) {
    VectorXd x(n);
    for (Index i = 0; i < n; ++i) x(i) = kTwoPi * double(i) / double(n);
    return x;
}

VectorXcd fft(const VectorXcd& u) {
    std::vector<cplx> in(u.data(), u.data() + u.size()), out;
    fft_engine().fwd(out, in);
    return Eigen::Map<VectorXcd>(out.data(), Index(out.size()));
}

VectorXcd ifft(const VectorXcd& c) {
    std::vector<cplx> in(c.data(), c.data() + c.size()), out;
    fft_engine().inv(out, in);
    return Eigen::Map<VectorXcd>(out.data(), Index(out.size()));
}

SpectralCoeffs to_spectral(const GridFunction& u) {
    require_grid_size(u.size());
    const double scale = std::sqrt(kTwoPi) / double(u.size());
    SpectralCoeffs c;
    c.coeffs.resize(u.size(), u.components());
    for (Index j = 0; j < u.components(); ++j) c.coeffs.col(j) = scale * fft(u.values.col(j));
    return c;
}

GridFunction from_spectral(const SpectralCoeffs& c) {
    require_grid_size(c.size());
    const double scale = double(c.size()) / std::sqrt(kTwoPi);
    GridFunction u(c.size(), c.components());
    for (Index j = 0; j < c.components(); ++j) u.values.col(j) = scale * ifft(c.coeffs.col(j));
    return u;
}

GridFunction apply_weights(const GridFunction& u, const VectorXcd& w) {
    if (w.size() != u.size()) throw std::invalid_argument("multiplier size mismatch");
    GridFunction out(u.size(), u.components());
    for (Index j = 0; j < u.components(); ++j)
        out.values.col(j) = ifft(fft(u.values.col(j)).cwiseProduct(w));
    return out;
}

GridFunction apply_weights(const GridFunction& u, const VectorXd& w) {
    return apply_weights(u, VectorXcd(w.cast<cplx>()));
}

VectorXcd weights_from(Index n, const std::function<cplx(double)>& w) {
    VectorXcd out(n);
    for (Index i = 0; i < n; ++i) out(i) = w(double(freq(i, n)));
    return out;
}

GridFunction apply_multiplier(const GridFunction& u, const std::function<cplx(double)>& w) {
    return apply_weights(u, weights_from(u.size(), w));
}

GridFunction apply_multiplier(const GridFunction& u, const std::function<MatrixXcd(double)>& w) {
    const Index n = u.size(), m = u.components();
    MatrixXcd hat(n, m);
    for (Index j = 0; j < m; ++j) hat.col(j) = fft(u.values.col(j));
    for (Index i = 0; i < n; ++i) {
        MatrixXcd wk = w(double(freq(i, n)));
        if (wk.rows() != m || wk.cols() != m) throw std::invalid_argument("multiplier block size");
        hat.row(i) = (wk * hat.row(i).transpose()).transpose();
    }
    GridFunction out(n, m);
    for (Index j = 0; j < m; ++j) out.values.col(j) = ifft(hat.col(j));
    return out;
}

GridFunction derivative(const GridFunction& u, int order) {
    const Index n = u.size();
    VectorXcd w(n);
    for (Index i = 0; i < n; ++i) w(i) = std::pow(cplx(0.0, double(freq(i, n))), order);
    return apply_weights(u, w);
}

GridFunction pointwise_apply(const MatrixXcd& field, const GridFunction& u) {
    const Index m = u.components();
    if (field.rows() != u.size() || field.cols() != m * m)
        throw std::invalid_argument("pointwise field shape");
    GridFunction out(u.size(), m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c)
            out.values.col(r) += field.col(r * m + c).cwiseProduct(u.values.col(c));
    return out;
}

double l2_norm(const GridFunction& u) {
    return std::sqrt(kTwoPi / double(u.size()) * u.values.squaredNorm());
}

double sup_norm(const GridFunction& u) {
    double s = 0.0;
    for (Index i = 0; i < u.size(); ++i) s = std::max(s, u.values.row(i).norm());
    return s;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size() || a.components() != b.components())
        throw std::invalid_argument("shape mismatch");
    return (a.values - b.values).cwiseAbs().maxCoeff();
}

GridFunction sample(Index n, const std::function<cplx(double)>& f) {
    GridFunction u(n, 1);
    for (Index i = 0; i < n; ++i) u.values(i, 0) = f(kTwoPi * double(i) / double(n));
    return u;
}

GridFunction constant_field(Index n, cplx c, Index m) {
    GridFunction u(n, m);
    u.values.setConstant(c);
    return u;
}

GridFunction mode(Index n, long k, cplx amplitude) {
    return sample(n, [&](double x) { return amplitude * std::exp(cplx(0.0, double(k) * x)); });
}

bool is_real(const GridFunction& u, double tol) {
    return u.values.imag().cwiseAbs().maxCoeff() <= tol * std::max(1.0, u.values.cwiseAbs().maxCoeff());
}

}  // namespace paracalc
