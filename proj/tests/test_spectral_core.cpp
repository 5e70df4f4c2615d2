#include <doctest.h>

#include <cmath>

#include "paracalc/dyadic.hpp"
#include "paracalc/grid.hpp"
#include "paracalc/rng.hpp"

using namespace paracalc;

namespace {

GridFunction random_field(Index n, std::uint64_t seed) {
    SplitMix rng(seed);
    GridFunction u(n, 2);
    for (Index i = 0; i < n; ++i)
        for (Index c = 0; c < 2; ++c) u.values(i, c) = cplx(rng.normal(), rng.normal());
    return u;
}

}  // namespace

TEST_CASE("grid sizes must be powers of two of at least 16") {
    CHECK(valid_grid_size(16));
    CHECK(valid_grid_size(1024));
    CHECK_FALSE(valid_grid_size(8));
    CHECK_FALSE(valid_grid_size(100));
    CHECK_THROWS_AS(require_grid_size(100), std::invalid_argument);
}

TEST_CASE("constant field has a single zero mode") {
    const auto c = to_spectral(constant_field(64, 3.0));
    CHECK(std::abs(c.at(0) - cplx(3.0 * std::sqrt(kTwoPi))) < 1e-12);
    for (long k = 1; k < 32; ++k) CHECK(std::abs(c.at(k)) < 1e-12);
}

TEST_CASE("single mode lands on its frequency") {
    const auto c = to_spectral(mode(64, 5));
    CHECK(std::abs(c.at(5) - cplx(std::sqrt(kTwoPi))) < 1e-12);
    CHECK(std::abs(c.at(-5)) < 1e-12);
}

TEST_CASE("transform round trip and Parseval") {
    const auto u = random_field(256, 7);
    const auto c = to_spectral(u);
    CHECK(max_abs_diff(from_spectral(c), u) < 1e-12);
    CHECK(std::abs(c.coeffs.norm() - l2_norm(u)) < 1e-10 * l2_norm(u));
}

TEST_CASE("real fields have Hermitian spectra") {
    const auto u = sample(128, [](double x) { return cplx(std::cos(3 * x) + 0.5 * std::sin(7 * x)); });
    CHECK(is_real(u));
    const auto c = to_spectral(u);
    for (long k = 1; k < 64; ++k) CHECK(std::abs(c.at(k) - std::conj(c.at(-k))) < 1e-12);
}

TEST_CASE("multipliers act on single modes") {
    const auto u = mode(64, 3);
    const auto du = apply_multiplier(u, [](double k) { return cplx(0.0, k); });
    CHECK(max_abs_diff(du, mode(64, 3, cplx(0.0, 3.0))) < 1e-12);
    CHECK(max_abs_diff(derivative(u), du) < 1e-12);
    const auto lu = apply_multiplier(u, [](double k) { return cplx(std::sqrt(1.0 + k * k)); });
    CHECK(max_abs_diff(lu, mode(64, 3, std::sqrt(10.0))) < 1e-12);
}

TEST_CASE("cutoff profile") {
    CHECK(chi(0.0) == doctest::Approx(1.0));
    CHECK(chi(1.1) == doctest::Approx(1.0));
    CHECK(chi(1.9) == doctest::Approx(0.0));
    CHECK(chi(5.0) == doctest::Approx(0.0));
    double prev = 1.0;
    for (double x = 0.0; x < 2.5; x += 0.01) {
        CHECK(chi(x) <= prev + 1e-15);
        prev = chi(x);
    }
    CHECK(phi(0.0) == doctest::Approx(0.0));
    CHECK(phi(1.0) == doctest::Approx(1.0));
}

TEST_CASE("dyadic block of a centred mode is the mode") {
    const Index n = 256;
    for (int j = 1; j <= j_max_for(n); ++j) {
        const auto u = mode(n, 1L << j);
        CHECK(max_abs_diff(dyadic_block(u, j), u) < 1e-12);
        for (int k = 0; k <= j_max_for(n) + 1; ++k)
            if (std::abs(k - j) > 1) CHECK(l2_norm(dyadic_block(u, k)) < 1e-12);
    }
}

TEST_CASE("constants live in the lowest block") {
    const auto u = constant_field(128, 2.0);
    CHECK(max_abs_diff(dyadic_block(u, 0), u) < 1e-12);
    for (int j = 1; j <= j_max_for(128); ++j) CHECK(l2_norm(dyadic_block(u, j)) < 1e-12);
    CHECK(max_abs_diff(low_pass(u, 3), u) < 1e-12);
}

TEST_CASE("blocks sum to the field") {
    const auto u = random_field(256, 3);
    GridFunction sum(256, 2);
    for (const auto& b : dyadic_blocks(u)) sum += b;
    CHECK(max_abs_diff(sum, u) < 1e-12);
}

TEST_CASE("low pass of a resolved field at the top scale is the field") {
    const Index n = 128;
    const auto u = sample(n, [](double x) { return cplx(std::cos(x) + std::sin(20 * x)); });
    CHECK(is_resolved(u));
    CHECK(max_abs_diff(low_pass(u, j_max_for(n)), u) < 1e-12);
}

TEST_CASE("Bernstein ratio for single modes") {
    const Index n = 512;
    CHECK(bernstein_ratio(mode(n, 16), 4, 1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bernstein_ratio(mode(n, 28), 4, 1) == doctest::Approx(28.0 / 16.0).epsilon(1e-9));
}

TEST_CASE("pointwise matrix field application") {
    const Index n = 32;
    MatrixXcd field(n, 4);
    for (Index i = 0; i < n; ++i) field.row(i) << 0.0, 1.0, 1.0, 0.0;
    GridFunction u(n, 2);
    u.component(0).setConstant(1.0);
    u.component(1).setConstant(2.0);
    const auto v = pointwise_apply(field, u);
    CHECK(std::abs(v.values(5, 0) - cplx(2.0)) < 1e-15);
    CHECK(std::abs(v.values(5, 1) - cplx(1.0)) < 1e-15);
}
