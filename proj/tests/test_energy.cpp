#include <doctest.h>

#include <cmath>

#include "paracalc/energy.hpp"
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

GridFunction two_component(Index n, long k) {
    GridFunction u(n, 2);
    u.component(0) = mode(n, k).component(0);
    u.component(1) = mode(n, -k, 0.5).component(0);
    return u;
}

}  // namespace

TEST_CASE("low frequency cutoff") {
    CHECK(theta(0.0) == doctest::Approx(1.0));
    CHECK(theta(1.0) == doctest::Approx(1.0));
    CHECK(theta(2.0) == doctest::Approx(0.0));
    CHECK(theta(-3.0) == doctest::Approx(0.0));
    CHECK(theta_mu(3.0, 4.0) == doctest::Approx(1.0));
    CHECK(theta_mu(8.0, 4.0) == doctest::Approx(0.0));
}

TEST_CASE("schedule validation") {
    EnergySchedule ok;
    ok.s = 0.5;
    ok.beta = 0.2;
    ok.T_star = 2.0;
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.s_at(1.0) == doctest::Approx(0.3));
    EnergySchedule late = ok;
    late.T_star = 3.0;
    CHECK_THROWS(late.validate());
    EnergySchedule small_mu = ok;
    small_mu.mu = 1.0;
    CHECK_THROWS(small_mu.validate());
}

TEST_CASE("Hermitian square root of a field") {
    const Index n = 8;
    MatrixXcd f(n, 4);
    for (Index i = 0; i < n; ++i) f.row(i) << 4.0, 0.0, 0.0, 9.0;
    const MatrixXcd r = hermitian_sqrt_field(f, 2);
    CHECK(std::abs(r(3, 0) - cplx(2.0)) < 1e-12);
    CHECK(std::abs(r(3, 3) - cplx(3.0)) < 1e-12);
    for (Index i = 0; i < n; ++i) f.row(i) << -1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS(hermitian_sqrt_field(f, 2));
}

TEST_CASE("identity symmetrizer gives Sigma = 1 - theta_mu") {
    const Index n = 64;
    const auto S = identity_symmetrizer(n, 2);
    const auto sigma = sigma_tilde(S, 2.0);
    CHECK((sigma.field(0.0, 10.0) - constant_matrix_field(n, MatrixXcd::Identity(2, 2))).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK(sigma.field(0.0, 0.0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sigma_square_residual(sigma, S, 2.0, 0.0, 3.0) < 1e-12);
}

TEST_CASE("energy of zero and of a high mode") {
    const Index n = 128;
    const EnergyFunctional E(identity_symmetrizer(n, 2), 2.0);
    EnergySchedule sched;
    const auto zero = E.energy(GridFunction(n, 2), 0.0, sched);
    CHECK(zero.E == 0.0);
    CHECK(zero.E_log == 0.0);
    const auto u = two_component(n, 20);
    const double norm = log_sobolev_norm(u, SobolevIndex(sched.s));
    CHECK(E.energy(u, 0.0, sched).E == doctest::Approx(norm * norm).epsilon(1e-10));
    const double nlog = log_sobolev_norm(u, SobolevIndex(sched.s, 0.5));
    CHECK(E.energy(u, 0.0, sched).E_log == doctest::Approx(nlog * nlog).epsilon(1e-10));
}

TEST_CASE("calibration with S = Id and S = 2 Id") {
    const Index n = 64;
    const auto corpus = calibration_corpus(n, 2, 1);
    CHECK(corpus.size() == 40);
    const auto one = calibrate_mu(identity_symmetrizer(n, 2), corpus);
    CHECK(one.ok);
    CHECK(one.mu == doctest::Approx(2.0));
    // E = ||(1-theta)u||^2 + ||theta u||^2 and (1-theta)^2 + theta^2 >= 1/2
    CHECK(one.C_mu <= std::sqrt(2.0) + 1e-9);
    CHECK(one.C_mu > 1.0);
    CHECK(one.C0 <= 1.0 + 1e-9);
    const auto two = calibrate_mu(identity_symmetrizer(n, 2).scaled(2.0), corpus);
    CHECK(two.ok);
    CHECK(two.mu == doctest::Approx(2.0));
    CHECK(two.C_mu <= std::sqrt(1.5) + 1e-9);  // 2(1-theta)^2 + theta^2 >= 2/3
    CHECK(two.C_mu < one.C_mu);
    CHECK(two.C0 <= std::sqrt(2.0) + 1e-9);
    CHECK(two.C0 > 1.0);
}

TEST_CASE("norm ladder rate matches a finite difference") {
    const auto v = mode(64, 9);
    const double s = 0.4, h = 1e-6;
    const double fd = (std::pow(log_sobolev_norm(v, SobolevIndex(s + h)), 2) -
                       std::pow(log_sobolev_norm(v, SobolevIndex(s - h)), 2)) /
                      (2.0 * h);
    CHECK(norm_ladder_rate(v, s, 1.0) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("damping B = -1/2 Id grows the energy at rate one") {
    const Index n = 32;
    const auto sys = constant_system(n, MatrixXd::Zero(2, 2), -0.5 * MatrixXd::Identity(2, 2));
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.5;
    cfg.record_stride = 5;
    const auto run = evolve(sys, two_component(n, 3), cfg);
    EnergySchedule sched;
    sched.T_star = cfg.t_end;
    const EnergyFunctional E(identity_symmetrizer(n, 2), 2.0);
    const auto rep = energy_derivative_probe(run, E, sched);
    CHECK(rep.C1 == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("Gronwall bound for a conservative evolution") {
    const Index n = 64;
    MatrixXd a0(2, 2);
    a0 << 1.0, 0.5, 0.5, -1.0;
    const auto sys = constant_system(n, a0);
    SolverConfig cfg;
    cfg.t_end = 0.5;
    cfg.record_stride = 4;
    const auto run = evolve(sys, two_component(n, 5), cfg);
    EnergySchedule sched;
    sched.T_star = cfg.t_end;
    const auto g = gronwall_check(run, sched, 1.01, 0.0);
    CHECK(g.verdict);
    CHECK(g.margin == doctest::Approx(0.01 / 1.01).epsilon(1e-3));
    CHECK_FALSE(gronwall_check(run, sched, 0.99, 0.0).verdict);
}
