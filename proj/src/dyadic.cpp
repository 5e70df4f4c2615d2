#include "paracalc/dyadic.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace paracalc {

namespace {

double bump_f(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

double smooth_step(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    const double a = bump_f(1.0 - s), b = bump_f(s);
    return a / (a + b);
}

double chi(double xi) { return smooth_step((std::abs(xi) - 1.1) / 0.8); }

double phi(double xi) { return chi(xi) - chi(2.0 * xi); }

int j_max_for(Index n) {
    int j = 0;
    while (Index(1) << (j + 2) <= n / 2) ++j;
    return j;
}

long resolved_cutoff(Index n) {
    return long(std::floor(1.1 * double(Index(1) << j_max_for(n))));
}

bool is_resolved(const GridFunction& u, double tol) {
    const SpectralCoeffs c = to_spectral(u);
    const long cut = resolved_cutoff(u.size());
    double outside = 0.0;
    for (Index i = 0; i < c.size(); ++i)
        if (std::abs(freq(i, c.size())) > cut) outside += c.coeffs.row(i).squaredNorm();
    return std::sqrt(outside) <= tol * std::max(1.0, c.coeffs.norm());
}

namespace {

struct WeightCache {
    std::mutex mu;
    std::map<std::pair<Index, int>, std::unique_ptr<VectorXd>> chi, block;
};

WeightCache& cache() {
    static WeightCache c;
    return c;
}

}  // namespace

const VectorXd& chi_weights(Index n, int j) {
    auto& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto& slot = c.chi[{n, j}];
    if (!slot) {
        slot = std::make_unique<VectorXd>(n);
        const double scale = std::ldexp(1.0, -j);
        for (Index i = 0; i < n; ++i) (*slot)(i) = chi(scale * double(freq(i, n)));
    }
    return *slot;
}

const VectorXd& block_weights(Index n, int j) {
    if (j < 0) throw std::out_of_range("negative block index");
    const VectorXd& hi = chi_weights(n, j);
    const VectorXd* lo = j > 0 ? &chi_weights(n, j - 1) : nullptr;
    auto& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto& slot = c.block[{n, j}];
    if (!slot) slot = std::make_unique<VectorXd>(lo ? VectorXd(hi - *lo) : hi);
    return *slot;
}

DyadicPartition::DyadicPartition(Index n_points) : n(n_points), j_max(j_max_for(n_points)) {
    require_grid_size(n_points);
}

VectorXd DyadicPartition::low(int j) const {
    if (j < 0) return VectorXd::Zero(n);
    return chi_weights(n, j);
}

VectorXd DyadicPartition::block(int j) const { return block_weights(n, j); }

GridFunction dyadic_block(const GridFunction& u, int j) {
    DyadicPartition p(u.size());
    if (j < 0 || j > p.top())
        throw std::out_of_range("block index " + std::to_string(j) + " outside [0, " +
                                std::to_string(p.top()) + "]");
    return apply_weights(u, p.block(j));
}

GridFunction low_pass(const GridFunction& u, int j) {
    DyadicPartition p(u.size());
    if (j < 0) return GridFunction(u.size(), u.components());
    return apply_weights(u, p.low(std::min(j, p.top())));
}

std::vector<GridFunction> dyadic_blocks(const GridFunction& u) {
    DyadicPartition p(u.size());
    std::vector<GridFunction> out;
    for (int j = 0; j <= p.top(); ++j) out.push_back(apply_weights(u, p.block(j)));
    return out;
}

double bernstein_ratio(const GridFunction& u, int j, int k_deriv) {
    if (j > j_max_for(u.size())) throw std::out_of_range("Bernstein ratio needs a full dyadic ring");
    const GridFunction b = dyadic_block(u, j);
    const double base = l2_norm(b);
    if (base <= 1e-300) throw std::domain_error("zero dyadic block");
    return l2_norm(derivative(b, k_deriv)) / (std::ldexp(1.0, j * k_deriv) * base);
}

}  // namespace paracalc
