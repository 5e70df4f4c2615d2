#pragma once

#include <vector>

#include "paracalc/grid.hpp"

namespace paracalc {

// Smooth step: 1 for s <= 0, 0 for s >= 1.
double smooth_step(double s);

// chi == 1 on |xi| <= 1.1, chi == 0 on |xi| >= 1.9.
double chi(double xi);
double phi(double xi);  // chi(xi) - chi(2 xi)

// Largest j with 2^{j+1} <= N/2.
int j_max_for(Index n);

// Frequencies |k| <= 1.1 * 2^{j_max} are reconstructed exactly by the partition.
bool is_resolved(const GridFunction& u, double tol = 1e-12);
long resolved_cutoff(Index n);

// chi(2^-j k) on the grid in FFT order, any integer j (negative j is a narrow low-pass, not zero).
// Cached per (N, j); the returned reference stays valid for the life of the program.
const VectorXd& chi_weights(Index n, int j);
// phi(2^-j k) for j >= 1, chi for j = 0. Cached.
const VectorXd& block_weights(Index n, int j);

struct DyadicPartition {
    Index n = 0;
    int j_max = 0;

    explicit DyadicPartition(Index n_points);

    // Multipliers in FFT order. block(j) is chi for j=0, phi(2^-j k) for j>=1; low(j) = chi(2^-j k), 0 for j<0.
    // Indices beyond j_max are allowed here: block(j_max+1) finishes the partition of the whole grid.
    VectorXd block(int j) const;
    VectorXd low(int j) const;
    int top() const { return j_max + 1; }
};

GridFunction dyadic_block(const GridFunction& u, int j);
GridFunction low_pass(const GridFunction& u, int j);

// All blocks 0..j_max+1 of u; they sum to u on the full grid.
std::vector<GridFunction> dyadic_blocks(const GridFunction& u);

// ||d^k Delta_j u|| / (2^{jk} ||Delta_j u||)
double bernstein_ratio(const GridFunction& u, int j, int k_deriv);

}  // namespace paracalc
