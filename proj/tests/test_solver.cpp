#include <doctest.h>

#include <cmath>

#include "paracalc/solver.hpp"

using namespace paracalc;

namespace {

HyperbolicSystem constant_system(Index n, const MatrixXd& a0, const MatrixXd& b0 = MatrixXd()) {
    SystemSpec spec;
    spec.preset = "constant";
    spec.n = n;
    spec.m = a0.rows();
    spec.a0 = a0;
    spec.b0 = b0;
    return make_system(spec);
}

GridFunction smooth_bump(Index n, double shift = 0.0) {
    return sample(n, [shift](double x) { return cplx(std::exp(2.0 * (std::cos(x - shift) - 1.0))); });
}

}  // namespace

TEST_CASE("right-hand side on a single mode") {
    const Index n = 32;
    const auto sys = constant_system(n, 2.0 * MatrixXd::Identity(1, 1));
    const auto u = mode(n, 3);
    CHECK(max_abs_diff(rhs(sys, 0.0, u), mode(n, 3, cplx(0.0, -6.0))) < 1e-12);
}

TEST_CASE("right-hand side on a constant is -B u") {
    const Index n = 32;
    const auto sys = constant_system(n, MatrixXd::Identity(1, 1), 3.0 * MatrixXd::Identity(1, 1));
    CHECK(max_abs_diff(rhs(sys, 0.0, constant_field(n, 2.0)), constant_field(n, -6.0)) < 1e-12);
}

TEST_CASE("scalar transport moves the profile") {
    const Index n = 128;
    const auto sys = constant_system(n, MatrixXd::Identity(1, 1));
    SolverConfig cfg;
    cfg.t_end = 1.0;
    const auto run = evolve(sys, smooth_bump(n), cfg);
    CHECK(max_abs_diff(run.states.back(), smooth_bump(n, 1.0)) < 1e-6);
}

TEST_CASE("symmetric 2x2 system splits into two transports") {
    const Index n = 128;
    MatrixXd a0(2, 2);
    a0 << 0.0, 1.0, 1.0, 0.0;
    const auto sys = constant_system(n, a0);
    GridFunction u0(n, 2);
    u0.component(0) = smooth_bump(n).component(0);
    SolverConfig cfg;
    cfg.t_end = 0.75;
    const auto u = evolve(sys, u0, cfg).states.back();
    const GridFunction plus(MatrixXcd(u.component(0) + u.component(1)));
    const GridFunction minus(MatrixXcd(u.component(0) - u.component(1)));
    CHECK(max_abs_diff(plus, smooth_bump(n, 0.75)) < 1e-6);
    CHECK(max_abs_diff(minus, smooth_bump(n, -0.75)) < 1e-6);
}

TEST_CASE("B = -Id grows like e^t") {
    const Index n = 16;
    const auto sys = constant_system(n, MatrixXd::Zero(1, 1), -MatrixXd::Identity(1, 1));
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    const auto run = evolve(sys, constant_field(n, 1.0), cfg);
    CHECK(std::abs(run.states.back().values(0, 0) - cplx(std::exp(1.0))) < 1e-9);
    CHECK(run.times.back() == doctest::Approx(1.0));
}

TEST_CASE("CFL guard") {
    const Index n = 64;
    const auto sys = constant_system(n, MatrixXd::Identity(1, 1));
    SolverConfig cfg;
    cfg.dt = 0.5;
    CHECK_THROWS_AS(evolve(sys, smooth_bump(n), cfg), NumericalGuardError);
    CHECK(cfl_step(sys, SolverConfig{}) > 0.0);
}

TEST_CASE("Friedrichs mollifier") {
    const Index n = 64;
    const auto u = mode(n, 10);
    CHECK(max_abs_diff(j_epsilon(u, 0.01), mode(n, 10, 1.0 / std::sqrt(2.0))) < 1e-12);
    CHECK(max_abs_diff(j_epsilon(u, 1e-14), u) < 1e-11);
    CHECK_THROWS(j_epsilon(u, 0.0));
}

TEST_CASE("commutator with a constant coefficient vanishes") {
    const Index n = 128;
    MatrixXd a0(2, 2);
    a0 << 1.0, 0.5, 0.5, -1.0;
    const auto sys = constant_system(n, a0);
    GridFunction u(n, 2);
    u.component(0) = smooth_bump(n).component(0);
    u.component(1) = smooth_bump(n, 1.0).component(0);
    const auto rep = commutator_probe(sys, u);
    CHECK(rep.verdict);
    for (double v : rep.norms) CHECK(v < 1e-10);
}

TEST_CASE("constant coefficients lose no regularity") {
    MatrixXd a0(2, 2);
    a0 << 1.0, 0.5, 0.5, -1.0;
    const auto sys = constant_system(128, a0);
    LossConfig lc;
    lc.j_lo = 3;
    lc.j_hi = 5;
    lc.s = 0.5;
    lc.records = 32;
    SolverConfig cfg;
    cfg.t_end = 1.0;
    const auto rep = loss_experiment(sys, lc, cfg);
    CHECK(rep.fits.size() == 3);
    CHECK(std::abs(rep.beta_hat) < 0.02);
}
