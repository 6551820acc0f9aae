#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "atsh/errors.hpp"
#include "atsh/integrator.hpp"
#include "atsh/phi.hpp"
#include "atsh/problems.hpp"
#include "atsh/tableau.hpp"

using atsh::BenchmarkId;
using atsh::build;
using atsh::integrate;
using atsh::make_problem;
using atsh::MethodId;
using atsh::Problem;
using atsh::ProblemParams;
using atsh::StarterMode;
using atsh::TwoStepState;

namespace {

Problem harmonic(double omega, double x_end, double y0 = 1.0, double dy0 = 0.0) {
    ProblemParams params;
    params.omega = omega;
    params.x_end = x_end;
    params.y0 = std::vector<double>{y0};
    params.dy0 = std::vector<double>{dy0};
    return make_problem(BenchmarkId::HarmonicPure, params);
}

// The same two-step scheme in complex arithmetic, for problems whose real
// pair form is the split of a scalar complex equation.
std::vector<std::complex<double>> complex_run(const atsh::Tableau& t, double h, double x_end) {
    using cd = std::complex<double>;
    auto g = [](double x) { return 0.001 * std::exp(cd(0.0, x)); };
    long n_steps = std::lround(x_end / h);
    std::vector<cd> traj(n_steps + 1);
    traj[0] = cd(1.0, 0.0);
    traj[1] = (1.0 - cd(0.0, 0.0005) * h) * std::exp(cd(0.0, h));
    std::vector<cd> stage(t.s), gs(t.s);
    for (long n = 1; n < n_steps; ++n) {
        double x = n * h;
        cd yp = traj[n - 1], yc = traj[n];
        for (int i = 0; i < t.s; ++i) {
            cd acc = (1.0 + t.c[i]) * yc - t.c[i] * yp;
            for (int j = 0; j < i; ++j)
                acc += h * h * t.A(i, j) * (gs[j] - stage[j]);
            stage[i] = acc;
            gs[i] = g(x + t.c[i] * h);
        }
        cd upd = t.two_phi0 * yc - yp;
        for (int i = 0; i < t.s; ++i)
            upd += h * h * t.b[i] * gs[i];
        traj[n + 1] = upd;
    }
    return traj;
}

} // namespace

TEST_SUITE("integrator") {

TEST_CASE("starting value for the pure oscillator") {
    Problem p = harmonic(1.0, 10.0);
    for (StarterMode mode : {StarterMode::Exact, StarterMode::Series, StarterMode::Oracle}) {
        auto y1 = atsh::start_value(p, 0.25, mode);
        REQUIRE(y1.size() == 1);
        CHECK(std::fabs(y1[0] - std::cos(0.25)) <= 1e-12);
    }
}

TEST_CASE("starting value from the stored solution") {
    Problem p = make_problem(BenchmarkId::StiefelBettis);
    auto y1 = atsh::start_value(p, 1.0, StarterMode::Exact);
    std::complex<double> z =
        (1.0 - std::complex<double>(0.0, 0.0005)) * std::exp(std::complex<double>(0.0, 1.0));
    CHECK(std::fabs(y1[0] - z.real()) <= 1e-15);
    CHECK(std::fabs(y1[1] - z.imag()) <= 1e-15);
}

TEST_CASE("starter modes agree on the inhomogeneous problem") {
    Problem p = make_problem(BenchmarkId::Inhomogeneous);
    auto exact = atsh::start_value(p, 0.125, StarterMode::Exact);
    auto oracle = atsh::start_value(p, 0.125, StarterMode::Oracle);
    auto series = atsh::start_value(p, 0.125, StarterMode::Series);
    CHECK(std::fabs(oracle[0] - exact[0]) <= 1e-12);
    CHECK(std::fabs(series[0] - exact[0]) <= 1e-7);
}

TEST_CASE("starter requires a stored solution only in exact mode") {
    Problem p = harmonic(2.0, 10.0);
    p.exact = nullptr;
    CHECK_THROWS_AS(atsh::start_value(p, 0.1, StarterMode::Exact), atsh::ExactUnavailable);
    CHECK_NOTHROW(atsh::start_value(p, 0.1, StarterMode::Oracle));
    CHECK_THROWS_AS(atsh::start_value(p, -0.1, StarterMode::Exact), atsh::InvalidParams);
}

TEST_CASE("single step reproduces the cosine recurrence") {
    double omega = 2.0, h = 0.3, nu = 0.6;
    Problem p = harmonic(omega, 10.0);
    atsh::Tableau t = build(MethodId::AdaptedNumerov4, nu);
    TwoStepState s;
    s.x_n = h;
    s.y_prev = {1.0};
    s.y_curr = {std::cos(nu)};
    TwoStepState s2 = atsh::step(t, p, s, h);
    CHECK(std::fabs(s2.x_n - 2 * h) <= 1e-16);
    CHECK(std::fabs(s2.y_curr[0] - std::cos(2 * nu)) <= 1e-15);
    CHECK(s2.y_prev[0] == s.y_curr[0]);
    // the two-step update is reversible for g = 0
    double back = t.two_phi0 * s2.y_prev[0] - s2.y_curr[0];
    CHECK(std::fabs(back - 1.0) <= 1e-15);
}

TEST_CASE("fresh evaluations per step reach the steady-state count") {
    Problem p = make_problem(BenchmarkId::Inhomogeneous);
    double h = 0.125;
    atsh::Tableau t = build(MethodId::Atsh5MinErr, p.omega * h);
    TwoStepState s;
    s.x_n = h;
    s.y_prev = p.y0;
    s.y_curr = atsh::start_value(p, h, StarterMode::Exact);
    TwoStepState s2 = atsh::step(t, p, s, h);
    CHECK(s2.g_evals == 4);
    TwoStepState s3 = atsh::step(t, p, s2, h);
    CHECK(s3.g_evals - s2.g_evals == 3);
    TwoStepState s4 = atsh::step(t, p, s3, h);
    CHECK(s4.g_evals - s3.g_evals == 3);
}

TEST_CASE("evaluation accounting over a run") {
    ProblemParams params;
    params.x_end = 1.25;
    Problem p = make_problem(BenchmarkId::Inhomogeneous, params);
    auto res = integrate(MethodId::Atsh5MinErr, p, 0.125);
    CHECK(res.xs.size() == 11);
    CHECK(res.starter_g_evals == 0);
    CHECK(res.g_evals == 3 * 9 + 1);
    auto res3 = integrate(MethodId::AdaptedNumerov4, p, 0.125);
    CHECK(res3.g_evals == 2 * 9 + 1);
}

TEST_CASE("pure oscillator is integrated to roundoff") {
    Problem p = harmonic(10.0, 100.0);
    for (MethodId id : {MethodId::AdaptedNumerov4, MethodId::Atsh5MinErr, MethodId::Atsh5Phase8,
                        MethodId::Atsh4ZeroDiss}) {
        auto res = integrate(id, p, 0.1);
        REQUIRE(res.max_global_error.has_value());
        CHECK(*res.max_global_error <= 1e-9);
    }
}

TEST_CASE("pure oscillator with a derivative component") {
    Problem p = harmonic(10.0, 100.0, 0.3, 2.7);
    auto res = integrate(MethodId::Atsh4ZeroDiss, p, 0.1);
    CHECK(*res.max_global_error <= 1e-9);
    double yN = res.ys.back();
    double expect = 0.3 * std::cos(1000.0) + 0.27 * std::sin(1000.0);
    CHECK(std::fabs(yN - expect) <= 1e-9);
}

TEST_CASE("grid and trajectory shape") {
    Problem p = make_problem(BenchmarkId::FrancoSystem);
    auto res = integrate(MethodId::Atsh5Phase8, p, 0.25);
    REQUIRE(res.dim == 2);
    REQUIRE(res.xs.size() == 21);
    REQUIRE(res.ys.size() == 42);
    CHECK(res.xs.front() == 0.0);
    CHECK(res.xs.back() == 5.0);
    CHECK(res.ys[0] == 1.0);
    CHECK(res.ys[1] == 1e-3);
    REQUIRE(res.max_global_error.has_value());
    CHECK(*res.max_global_error < 1e-3);
}

TEST_CASE("real pair run matches complex arithmetic") {
    Problem p = make_problem(BenchmarkId::StiefelBettis);
    double h = 1.0;
    auto res = integrate(MethodId::Atsh5MinErr, p, h);
    atsh::Tableau t = build(MethodId::Atsh5MinErr, p.omega * h);
    auto ztraj = complex_run(t, h, p.x_end);
    REQUIRE(res.xs.size() == ztraj.size());
    double worst = 0.0;
    for (size_t n = 0; n < ztraj.size(); ++n) {
        worst = std::max(worst, std::fabs(res.ys[2 * n] - ztraj[n].real()));
        worst = std::max(worst, std::fabs(res.ys[2 * n + 1] - ztraj[n].imag()));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("declared convergence orders are observed") {
    Problem p1 = make_problem(BenchmarkId::Inhomogeneous);
    Problem p4 = make_problem(BenchmarkId::FrancoSystem);
    std::vector<double> hs1, hs4;
    for (int j = 3; j <= 7; ++j)
        hs1.push_back(std::ldexp(1.0, -j));
    for (int j = 3; j <= 7; ++j)
        hs4.push_back(std::ldexp(1.0, -j));
    // The fifth-order pair needs its asymptotic window: above h ~ 2^-4 its
    // error constant still varies with nu, below h ~ 2^-6 roundoff takes
    // over, so sample exactly dividing stepsizes in between.
    std::vector<double> hs_fine = {5.0 / 160.0, 5.0 / 226.0, 5.0 / 320.0};
    CHECK(atsh::convergence_order(MethodId::Atsh5MinErr, p4, hs_fine) ==
          doctest::Approx(5.0).epsilon(0.04));
    CHECK(atsh::convergence_order(MethodId::AdaptedNumerov4, p1, hs1) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(atsh::convergence_order(MethodId::ClassicalPhase8, p4, hs4) == doctest::Approx(5.0).epsilon(0.04));
}

TEST_CASE("convergence order input validation") {
    Problem p = make_problem(BenchmarkId::FrancoSystem);
    CHECK_THROWS_AS(atsh::convergence_order(MethodId::Atsh5MinErr, p, {0.25, 0.125}),
                    atsh::InvalidParams);
    CHECK_THROWS_AS(atsh::convergence_order(MethodId::Atsh5MinErr, p, {0.125, 0.25, 0.5}),
                    atsh::InvalidParams);
    Problem q = p;
    q.exact = nullptr;
    CHECK_THROWS_AS(atsh::convergence_order(MethodId::Atsh5MinErr, q, {0.5, 0.25, 0.125}),
                    atsh::ExactUnavailable);
}

TEST_CASE("blow-up raises an error") {
    Problem p = harmonic(10.0, 200.0);
    CHECK_THROWS_AS(integrate(MethodId::ClassicalNumerov4, p, 0.625), atsh::NonFiniteState);
}

TEST_CASE("singular stepsize is reported") {
    // locate the zero of 400 phi_6 - 21 phi_4 where the fifth-order weights
    // lose their denominator
    double lo = 5.5, hi = 5.6;
    auto f = [](double nu) { return 400.0 * atsh::phi(6, nu) - 21.0 * atsh::phi(4, nu); };
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
    }
    Problem p = harmonic(10.0, 100.0);
    CHECK_THROWS_AS(integrate(MethodId::Atsh5MinErr, p, 0.5 * (lo + hi) / 10.0),
                    atsh::SingularCoefficient);
}

TEST_CASE("shortened final step lands on the endpoint") {
    Problem p = harmonic(1.0, 1.0);
    auto res = integrate(MethodId::Atsh5MinErr, p, 0.3);
    REQUIRE(res.xs.size() == 5);
    CHECK(res.xs.back() == 1.0);
    CHECK(std::fabs(res.ys.back() - std::cos(1.0)) <= 1e-12);
    CHECK(*res.max_global_error <= 1e-12);
}

TEST_CASE("shortened final step on a perturbed problem") {
    Problem p = make_problem(BenchmarkId::Inhomogeneous);
    auto res = integrate(MethodId::Atsh5MinErr, p, 0.45);
    CHECK(res.xs.back() == 100.0);
    REQUIRE(res.max_global_error.has_value());
    // the closing step reconstructs a derivative from grid data; it is less
    // accurate than the bulk of the run but must stay in a sane band
    CHECK(*res.max_global_error <= 5e-2);
    double bulk = 0.0;
    for (size_t n = 0; n + 1 < res.xs.size(); ++n) {
        double e = 0.0;
        p.exact(res.xs[n], &e);
        bulk = std::max(bulk, std::fabs(res.ys[n] - e));
    }
    CHECK(bulk <= 1e-3);
}

TEST_CASE("interval shorter than one step") {
    Problem p = harmonic(2.0, 0.25);
    auto res = integrate(MethodId::AdaptedNumerov4, p, 0.4);
    REQUIRE(res.xs.size() == 2);
    CHECK(res.xs.back() == 0.25);
    CHECK(std::fabs(res.ys.back() - std::cos(0.5)) <= 1e-14);
    Problem q = harmonic(2.0, 0.3);
    auto res1 = integrate(MethodId::AdaptedNumerov4, q, 0.3);
    REQUIRE(res1.xs.size() == 2);
    CHECK(res1.g_evals == 0);
}

TEST_CASE("satellite trajectory error against the oracle") {
    Problem p = make_problem(BenchmarkId::Satellite);
    double h = (1.0 - 3.14159265358979312 / 100.0) * 0.5;
    auto res = integrate(MethodId::Atsh5MinErr, p, h, StarterMode::Oracle);
    REQUIRE(res.max_global_error.has_value());
    CHECK(*res.max_global_error < 1e-5);
    CHECK(*res.max_global_error > 0.0);
}

} // TEST_SUITE
