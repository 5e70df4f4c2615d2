#include <doctest.h>

#include <cmath>
#include <numeric>

#include "paracalc/symbols.hpp"

using namespace paracalc;

namespace {

cplx japanese(double xi) { return std::sqrt(1.0 + xi * xi); }

TimePath linear_path(Index n_t, double t_end) {
    TimePath p;
    p.t_end = t_end;
    p.values = VectorXd::LinSpaced(n_t, 0.0, t_end);
    return p;
}

}  // namespace

TEST_CASE("admissible cutoff is one near eta = 0 and zero far out") {
    const DyadicPartition part(256);
    const auto psi = make_psi_minus3(part);
    for (double xi : {0.0, 1.0, 5.0, 40.0, 100.0}) CHECK(psi(0.0, xi) == doctest::Approx(1.0));
    CHECK(psi(1.0, 0.0) == doctest::Approx(0.0));
    CHECK(psi(60.0, 64.0) == doctest::Approx(0.0));
    for (double eta = 0.0; eta < 50.0; eta += 0.7)
        for (double xi : {0.0, 3.0, 17.0, 64.0}) {
            CHECK(psi(eta, xi) >= -1e-15);
            CHECK(psi(eta, xi) <= 1.0 + 1e-15);
        }
    CHECK(psi.eps1 > 0.0);
    CHECK(psi.eps1 < psi.eps2);
    CHECK(psi.eps2 < 1.0);
}

TEST_CASE("mollifier is a normalized bump") {
    CHECK(mollifier(1.0) == 0.0);
    CHECK(mollifier(-1.5) == 0.0);
    CHECK(mollifier(0.0) == doctest::Approx(mollifier_constant() * std::exp(-1.0)));
    const int n = 4001;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += mollifier(-1.0 + 2.0 * i / (n - 1));
    CHECK(sum * 2.0 / (n - 1) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("discrete kernel weights are normalized") {
    const auto w = kernel_weights(0.5, 0.05, 1025, 1.0 / 1024.0);
    REQUIRE_FALSE(w.value.empty());
    CHECK(std::accumulate(w.value.begin(), w.value.end(), 0.0) == doctest::Approx(1.0));
    CHECK(std::abs(std::accumulate(w.deriv.begin(), w.deriv.end(), 0.0)) < 1e-8);
}

TEST_CASE("time mollification keeps constants and linear paths") {
    const Index n = 32;
    const auto one = constant_field(n, 1.0);
    const auto a = separable_symbol(linear_path(1025, 1.0), one, [](double) { return cplx(1.0); }, 0.0, 0.0);
    const auto ae = mollify_time(a, 0.05);
    CHECK(std::abs(ae.field(0.5, 3.0)(0, 0) - cplx(0.5)) < 1e-9);
    CHECK(std::abs(ae.field(0.3, 3.0)(7, 0) - cplx(0.3)) < 1e-9);
    const auto b = scalar_symbol(one, [](double) { return cplx(2.0); }, 0.0, 0.0);
    CHECK(std::abs(mollify_time(b, 0.1).field(0.4, 1.0)(0, 0) - cplx(2.0)) < 1e-12);
    CHECK(std::abs(time_derivative(mollify_time(a, 0.05)).field(0.5, 1.0)(0, 0) - cplx(1.0)) < 1e-6);
}

TEST_CASE("symbol seminorm of the order one multiplier") {
    const auto a = multiplier_symbol(256, japanese, 1.0, 0.0);
    const auto tab = symbol_seminorm(a, 1);
    REQUIRE(tab.size() == 2);
    CHECK(tab[0] >= 1.0 / std::sqrt(2.0) - 1e-12);
    CHECK(tab[0] <= 1.0 + 1e-12);
    CHECK(tab[1] <= 1.0 + 1e-6);
}

TEST_CASE("x-independent symbols are unchanged by the cutoff and the tilde construction") {
    const Index n = 128;
    const DyadicPartition part(n);
    const auto a = multiplier_symbol(n, japanese, 1.0, 0.0);
    const auto sa = smooth_symbol(a, make_psi_minus3(part));
    const auto ta = tilde_symbol(a);
    for (double xi : {0.0, 2.0, 9.0, 33.0}) {
        CHECK((sa.field(0.0, xi) - a.field(0.0, xi)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((ta.field(0.0, xi) - a.field(0.0, xi)).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(commutation_check(a, make_psi_minus3(part), {0.0}, {1.0, 8.0, 30.0}) < 1e-12);
}

TEST_CASE("tilde bands") {
    CHECK(tilde_band(0.0, 8) == 0);
    CHECK(tilde_band(1.0, 8) == 0);
    CHECK(tilde_band(16.0, 8) == 4);
    CHECK(tilde_band(-16.0, 8) == 4);
    CHECK(tilde_band(1e6, 8) == 8);
    CHECK(tilde_eps(3) == doctest::Approx(0.125));
}

TEST_CASE("symbol slice reproduces a multiplier") {
    const Index n = 64;
    const auto a = multiplier_symbol(n, japanese, 1.0, 0.0);
    const SymbolSlice slice(a, 0.0);
    const auto u = mode(n, 5);
    CHECK(max_abs_diff(slice.apply(u), mode(n, 5, std::sqrt(26.0))) < 1e-12);
}

TEST_CASE("adjoint symbol conjugates") {
    const Index n = 32;
    const auto a = multiplier_symbol(n, [](double xi) { return cplx(0.0, xi); }, 1.0, 0.0);
    const auto b = adjoint_symbol(a);
    CHECK(std::abs(b.field(0.0, 3.0)(0, 0) - cplx(0.0, -3.0)) < 1e-12);
}

TEST_CASE("coefficient path interpolation") {
    const Index n = 16;
    const auto field = constant_matrix_field(n, MatrixXcd::Identity(2, 2));
    const auto p = CoefficientPath::separable(linear_path(11, 1.0), field);
    CHECK_FALSE(p.t_constant());
    CHECK(p.x_constant());
    CHECK(std::abs(p.value(0.35)(3, 0) - cplx(0.35)) < 1e-12);
    CHECK(std::abs(p.value(0.35)(3, 1)) < 1e-12);
    CHECK(CoefficientPath::constant(field).t_constant());
}
