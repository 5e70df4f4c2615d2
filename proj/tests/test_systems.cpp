#include <doctest.h>

#include <cmath>

#include "paracalc/systems.hpp"

using namespace paracalc;

namespace {

HyperbolicSystem constant_system(const MatrixXd& a0, Index n = 32) {
    SystemSpec spec;
    spec.preset = "constant";
    spec.n = n;
    spec.m = a0.rows();
    spec.a0 = a0;
    return make_system(spec);
}

MatrixXd mat2(double a, double b, double c, double d) {
    MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("principal symbol is linear in the frequency") {
    const auto sys = constant_system(mat2(1, 0.5, 0.5, -1));
    CHECK(principal_symbol(sys, 0.0, 3, 0.0).cwiseAbs().maxCoeff() == 0.0);
    const MatrixXcd p = principal_symbol(sys, 0.0, 3, 2.0);
    const MatrixXcd q = principal_symbol(sys, 0.0, 3, -2.0);
    CHECK((p + q).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(std::abs(p(0, 1) - cplx(1.0)) < 1e-15);
}

TEST_CASE("rotation generator is not hyperbolic") {
    const auto rep = check_hyperbolic(constant_system(mat2(0, -1, 1, 0)), {});
    CHECK_FALSE(rep.verdict);
    CHECK(rep.max_imag > 0.5);
}

TEST_CASE("symmetric matrix is strictly hyperbolic") {
    const auto rep = check_hyperbolic(constant_system(mat2(0, 1, 1, 0)), {});
    CHECK(rep.verdict);
    CHECK(rep.max_imag < 1e-12);
    CHECK(rep.min_gap == doctest::Approx(2.0));
}

TEST_CASE("identity symmetrizer for a symmetric system") {
    const auto sys = constant_system(mat2(1, 0.5, 0.5, -1));
    const auto S = identity_symmetrizer(sys.n, sys.m);
    CHECK(S.lambda == doctest::Approx(1.0));
    CHECK(S.Lambda == doctest::Approx(1.0));
    const auto rep = verify_symmetrizer(S, sys, {});
    CHECK(rep.max_residual() < 1e-12);
}

TEST_CASE("diagonal system has the identity as built symmetrizer") {
    const auto sys = constant_system(mat2(1, 0, 0, -1));
    const auto S = build_symmetrizer(sys, {});
    CHECK((S.at(0.0, 0) - MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("wave reduction is symmetrized") {
    SystemSpec spec;
    spec.preset = "wave";
    spec.n = 64;
    spec.amp = 0.3;
    const auto sys = make_system(spec);
    CHECK(check_hyperbolic(sys, {}).verdict);
    const auto S = build_symmetrizer(sys, {});
    const auto rep = verify_symmetrizer(S, sys, {});
    CHECK(rep.hermitian_residual < 1e-12);
    CHECK(rep.symmetrizing_residual < 1e-12);
    CHECK(rep.positivity_residual < 1e-12);
    CHECK(rep.lambda > 0.0);
}

TEST_CASE("scaling the symmetrizer scales its bounds") {
    const auto sys = constant_system(mat2(0, 2, 1, 0));
    const auto S = build_symmetrizer(sys, {});
    const auto S2 = S.scaled(2.0);
    CHECK(S2.lambda == doctest::Approx(2.0 * S.lambda));
    CHECK(S2.Lambda == doctest::Approx(2.0 * S.Lambda));
    CHECK(verify_symmetrizer(S2, sys, {}).max_residual() < 1e-12);
}

TEST_CASE("a Jordan block cannot be symmetrized") {
    CHECK_THROWS(build_symmetrizer(constant_system(mat2(1, 1, 0, 1)), {}));
}

TEST_CASE("measured regularity of constant and LL coefficients") {
    const auto c = measure_regularity(constant_system(mat2(1, 0, 0, -1)), {0.0});
    CHECK(c.ll_x == doctest::Approx(0.0));
    CHECK(c.linf == doctest::Approx(std::sqrt(2.0)));  // Frobenius norm of diag(1,-1)
    SystemSpec spec;
    spec.preset = "ll_x";
    spec.n = 256;
    spec.m = 1;
    spec.amp = 0.2;
    spec.terms = 4;
    const auto sys = make_system(spec);
    const auto r = measure_regularity(sys, {0.0});
    CHECK(r.ll_x > 0.0);
    CHECK(regularity_consistent(sys, {0.0}));
}

TEST_CASE("eigenframe system keeps eigenvalues plus and minus one") {
    const auto sys = eigenframe_system(16, [](double t) { return 0.3 * t; }, "frame");
    SampleSet samples;
    samples.times = {0.0, 0.5, 1.0};
    const auto rep = check_hyperbolic(sys, samples);
    CHECK(rep.verdict);
    CHECK(rep.min_gap == doctest::Approx(2.0));
}

TEST_CASE("unknown preset is rejected") {
    SystemSpec spec;
    spec.preset = "nope";
    CHECK_THROWS_AS(make_system(spec), std::invalid_argument);
}
