#include <doctest.h>

#include <cmath>

#include "paracalc/paradiff.hpp"

using namespace paracalc;

namespace {

GridFunction trig(Index n, std::initializer_list<std::pair<long, double>> modes) {
    return sample(n, [&](double x) {
        cplx v = 0.0;
        for (const auto& [k, a] : modes) v += a * std::cos(double(k) * x + 0.3 * double(k));
        return v;
    });
}

cplx japanese(double xi) { return std::sqrt(1.0 + xi * xi); }

}  // namespace

TEST_CASE("paraproduct by a constant drops the lowest blocks") {
    const Index n = 256;
    const auto u = trig(n, {{1, 1.0}, {3, 0.5}, {12, 0.7}, {40, 0.2}});
    const auto c = constant_field(n, 2.5);
    const GridFunction expect = 2.5 * (u - low_pass(u, 2));
    CHECK(max_abs_diff(paraproduct(c, u), expect) < 1e-12);
}

TEST_CASE("paraproduct by a low frequency coefficient on a high mode is the product") {
    const Index n = 256;
    const auto a = trig(n, {{0, 1.0}, {1, 0.5}, {2, 0.25}});
    const auto u = mode(n, 32);
    const GridFunction prod(a.values.cwiseProduct(u.values));
    CHECK(max_abs_diff(paraproduct(a, u), prod) < 1e-12);
}

TEST_CASE("Bony decomposition is exact for alias-free products") {
    const Index n = 256;
    const auto a = trig(n, {{1, 1.0}, {5, 0.3}, {17, 0.4}, {50, 0.1}});
    const auto u = trig(n, {{2, 0.6}, {9, 0.8}, {30, 0.2}, {60, 0.3}});
    const GridFunction prod(a.values.cwiseProduct(u.values));
    const GridFunction sum = paraproduct(a, u) + paraproduct(u, a) + bony_remainder(a, u);
    CHECK(max_abs_diff(sum, prod) < 1e-12);
}

TEST_CASE("remainder vanishes for well separated spectra") {
    const Index n = 256;
    CHECK(l2_norm(bony_remainder(mode(n, 2), mode(n, 64))) < 1e-12);
}

TEST_CASE("quantization of a Fourier multiplier is the multiplier") {
    const Index n = 128;
    const auto a = multiplier_symbol(n, japanese, 1.0, 0.0);
    const auto u = trig(n, {{0, 1.0}, {3, 0.5}, {20, 0.7}, {50, 0.2}});
    CHECK(max_abs_diff(apply_paradiff(a, 0.0, u), apply_multiplier(u, japanese)) < 1e-11);
}

TEST_CASE("factorized quadrature agrees with the direct dense matrix") {
    const Index n = 32;
    const auto c = probe_ll_coefficient(n, 1);
    const auto a = smooth_symbol(scalar_symbol(c, japanese, 1.0, 1.0), make_psi_minus3(DyadicPartition(n)));
    const auto u = trig(n, {{1, 1.0}, {4, 0.5}, {9, 0.3}, {14, 0.2}});
    const MatrixXcd M = paradiff_matrix(a, 0.0);
    CHECK(max_abs_diff(apply_paradiff(a, 0.0, u), apply_dense(M, u)) < 1e-10);
    CHECK(max_abs_diff(apply_dense(dense_matrix(paradiff_operator(a), n, 1), u), apply_dense(M, u)) < 1e-10);
}

TEST_CASE("smoothed symbols are spectrally admissible") {
    const Index n = 128;
    const DyadicPartition part(n);
    const auto psi = make_psi_minus3(part);
    const auto a = smooth_symbol(scalar_symbol(probe_ll_coefficient(n, 2), japanese, 1.0, 1.0), psi);
    CHECK(spectrally_admissible(a, 0.0, psi.eps2));
}

TEST_CASE("order of the multiplier (1+xi^2)^{1/2}") {
    ProbeOptions o;
    o.n = 256;
    o.tests_per_scale = 2;
    const auto rep = operator_order_fit(
        [](const GridFunction& u) { return apply_multiplier(u, japanese); }, 1.0, 0.0, 0.5, 0.0, o);
    CHECK(std::abs(rep.fitted_slope) < 0.02);
    CHECK(rep.verdict);
}

TEST_CASE("an operator of lower order is seen as such") {
    ProbeOptions o;
    o.n = 256;
    o.tests_per_scale = 2;
    const auto rep = operator_order_fit(
        [](const GridFunction& u) { return apply_multiplier(u, [](double) { return cplx(1.0); }); }, 1.0, 0.0,
        0.5, 0.0, o);
    CHECK(rep.fitted_slope < -0.8);
}

TEST_CASE("composition of multipliers leaves no remainder") {
    ProbeOptions o;
    o.n = 128;
    o.tests_per_scale = 2;
    const auto a = multiplier_symbol(o.n, japanese, 1.0, 0.0);
    const auto b = multiplier_symbol(o.n, [](double xi) { return cplx(0.0, xi); }, 1.0, 0.0);
    const auto reps = composition_remainder_probe(a, b, o, false, 0.0, {SobolevIndex(0.5, 0.0)});
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].vanishes);
}

TEST_CASE("adjoint of a symmetric multiplier quantization leaves no remainder") {
    ProbeOptions o;
    o.n = 128;
    o.tests_per_scale = 2;
    const auto a = multiplier_symbol(o.n, [](double xi) { return cplx(0.0, xi); }, 1.0, 0.0);
    const auto reps = adjoint_remainder_probe(a, o, {SobolevIndex(0.0, 0.0)});
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].vanishes);
}

TEST_CASE("paralinearization residual of a constant coefficient") {
    const Index n = 128;
    const auto u = trig(n, {{1, 1.0}, {20, 0.5}});
    const auto r = paralin_residual(constant_field(n, 3.0), u, 1);
    CHECK(max_abs_diff(r, 3.0 * derivative(low_pass(u, 2))) < 1e-11);
}

TEST_CASE("probe coefficient is real and seeded") {
    const auto a = probe_ll_coefficient(256, 3);
    CHECK(is_real(a));
    CHECK(max_abs_diff(a, probe_ll_coefficient(256, 3)) == 0.0);
    CHECK(max_abs_diff(a, probe_ll_coefficient(256, 4)) > 0.0);
}
