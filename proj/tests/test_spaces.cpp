#include <doctest.h>

#include <cmath>

#include "paracalc/dyadic.hpp"
#include "paracalc/rng.hpp"
#include "paracalc/spaces.hpp"

using namespace paracalc;

TEST_CASE("log-Sobolev weight") {
    CHECK(log_sobolev_weight(0.0, {0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(log_sobolev_weight(7.0, {1.0, 0.0}) == doctest::Approx(std::sqrt(50.0)));
    CHECK(log_sobolev_weight(7.0, {0.0, 1.0}) == doctest::Approx(std::log(9.0)));
    CHECK(log_sobolev_weight(-7.0, {1.0, 1.0}) == doctest::Approx(std::sqrt(50.0) * std::log(9.0)));
}

TEST_CASE("log-Sobolev norm of a single mode") {
    const auto u = mode(128, 7);
    const double l2 = l2_norm(u);
    CHECK(l2 == doctest::Approx(std::sqrt(kTwoPi)));
    CHECK(log_sobolev_norm(u, {1.0, 0.0}) == doctest::Approx(std::sqrt(50.0) * l2));
    CHECK(log_sobolev_norm(u, {0.0, 1.0}) == doctest::Approx(std::log(9.0) * l2));
    CHECK(log_sobolev_norm(GridFunction(128, 1), {1.0, 1.0}) == 0.0);
}

TEST_CASE("Besov norm of a centred mode picks one block") {
    const auto u = mode(256, 16);
    const double l2 = l2_norm(u);
    CHECK(log_besov_norm(u, 1.0, 0.0, 2.0, 2.0) == doctest::Approx(16.0 * l2));
    CHECK(log_besov_norm(u, 0.0, 1.0, 2.0, kInf) == doctest::Approx(5.0 * l2));
    CHECK(log_besov_norm(u, 0.0, 0.0, kInf, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("LL seminorm of constants vanishes and scales linearly") {
    CHECK(ll_seminorm_direct(constant_field(256, 3.0)) == doctest::Approx(0.0));
    const auto f = sample(256, [](double x) { return cplx(std::sin(x)); });
    const double v = ll_seminorm_direct(f);
    CHECK(v > 0.5);
    CHECK(v < 1.5);
    CHECK(ll_seminorm_direct(3.0 * f) == doctest::Approx(3.0 * v));
}

TEST_CASE("lacunary LL generator matches its closed form") {
    const Index n = 256;
    const std::uint64_t seed = 4;
    const auto f = gen_ll_function(n, seed, 1);
    const double ph = phase(seed, 1);
    const auto g = sample(n, [&](double x) { return cplx(std::cos(2.0 * x + ph)); });
    CHECK(max_abs_diff(f, g) < 1e-12);
    const auto f5 = gen_ll_function(n, seed, 5);
    CHECK(is_real(f5));
    double bound = 0.0;
    for (int j = 1; j <= 5; ++j) bound += (1.0 + j) * std::ldexp(1.0, -j);
    CHECK(sup_norm(f5) <= bound + 1e-12);
}

TEST_CASE("Holder generator block decay") {
    const Index n = 4096;
    const double gamma = 0.5;
    const auto f = gen_holder_function(n, gamma, 2, 9);
    double prev = 0.0;
    for (int j = 3; j <= 9; ++j) {
        const double b = sup_norm(dyadic_block(f, j));
        if (prev > 0.0) CHECK(std::log2(b / prev) == doctest::Approx(-gamma).epsilon(0.1));
        prev = b;
    }
}

TEST_CASE("LL function is not Lipschitz") {
    const auto f = gen_ll_function(4096, 1, 9);
    const double q_coarse = difference_quotient_at(f, kTwoPi / 64.0);
    const double q_fine = difference_quotient_at(f, kTwoPi / 4096.0);
    CHECK(q_fine > q_coarse);
}

TEST_CASE("time path interpolation") {
    TimePath p;
    p.t_end = 2.0;
    p.values = VectorXd::LinSpaced(5, 0.0, 4.0);
    CHECK(p.dt() == doctest::Approx(0.5));
    CHECK(p.at(0.25) == doctest::Approx(0.5));
    CHECK(p.at(-1.0) == doctest::Approx(0.0));
    CHECK(p.at(5.0) == doctest::Approx(4.0));
}

TEST_CASE("time coefficient agrees with its pointwise formula") {
    const auto g = gen_ll_time_coefficient(3, 6, 1025, 1.0);
    for (Index l = 0; l < g.samples(); l += 128)
        CHECK(g.values(l) == doctest::Approx(ll_time_value(3, 6, g.time(l))).epsilon(1e-12));
}

TEST_CASE("product with a constant multiplies every norm by its modulus") {
    const auto a = constant_field(256, cplx(0.0, 2.0));
    const auto t = product_probe(a, CoefficientClass::Constant, {0.5, 0.0}, 4, 9, 2);
    REQUIRE_FALSE(t.ratios.empty());
    for (double r : t.ratios) CHECK(r == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("dyadic test set is band limited and seeded") {
    const auto a = dyadic_test_set(256, 4, 3, 11);
    const auto b = dyadic_test_set(256, 4, 3, 11);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(max_abs_diff(a[i], b[i]) == 0.0);
        const auto c = to_spectral(a[i]);
        for (Index k = 0; k < c.size(); ++k) {
            const double ak = std::abs(double(freq(k, 256)));
            if (ak < 8.0 || ak > 32.0) CHECK(std::abs(c.coeffs(k, 0)) < 1e-12);
        }
    }
}
