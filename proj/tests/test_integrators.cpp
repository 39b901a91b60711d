#include "doctest.h"

#include <cmath>
#include <limits>

#include "pendlab/errors.hpp"
#include "pendlab/integrators.hpp"

using namespace pendlab;

namespace {

// Max |theta - theta0 cos(wt)| of the linear frictionless model over [0, T].
double linear_error(IntegratorKind kind, double dt, double T) {
    PendulumParams p;
    const double w = std::sqrt(p.g / p.ell);
    auto rhs = pendulum_rhs(Model::Linear, p);
    SimState s{1.0, 0.0, 0.0};
    const long n = std::lround(T / dt);
    double worst = 0.0;
    for (long k = 1; k <= n; ++k) {
        s = integrate_step(kind, rhs, s, 0.0, StepSize(dt));
        worst = std::max(worst, std::abs(s.theta - std::cos(w * k * dt)));
    }
    return worst;
}

}  // namespace

TEST_SUITE("integrators") {

TEST_CASE("step size bounds") {
    CHECK_THROWS_AS(StepSize(0.0), ConfigError);
    CHECK_THROWS_AS(StepSize(-1e-3), ConfigError);
    CHECK_THROWS_AS(StepSize(0.1000001), ConfigError);
    CHECK_THROWS_AS(StepSize(std::numeric_limits<double>::quiet_NaN()), ConfigError);
    CHECK(StepSize(0.1).value() == 0.1);
    CHECK(StepSize(1e-3).value() == 1e-3);
}

TEST_CASE("constant acceleration: RK4 exact, Euler first order") {
    auto rhs = [](const SimState& s, double tau) { return StateDeriv{s.omega, tau}; };
    const SimState s0{0.5, -1.0, 2.0};
    const double a = 3.0, dt = 0.05;
    auto r = rk4_step(rhs, s0, a, StepSize(dt));
    CHECK(r.theta == doctest::Approx(0.5 - dt + 0.5 * a * dt * dt).epsilon(1e-14));
    CHECK(r.omega == doctest::Approx(-1.0 + a * dt).epsilon(1e-14));
    CHECK(r.t == doctest::Approx(2.05));
    auto e = euler_step(rhs, s0, a, StepSize(dt));
    CHECK(e.theta == doctest::Approx(0.5 - dt));
    CHECK(e.omega == doctest::Approx(-1.0 + a * dt));
}

TEST_CASE("one RK4 step matches the Taylor series of the harmonic oscillator") {
    // for x'' = -w^2 x the RK4 amplification of theta is 1 - h^2/2 + h^4/24 (h = w dt)
    PendulumParams p;
    const double w = std::sqrt(p.g / p.ell), dt = 0.01, h = w * dt;
    auto s = rk4_step(pendulum_rhs(Model::Linear, p), {1.0, 0.0, 0.0}, 0.0, StepSize(dt));
    CHECK(s.theta == doctest::Approx(1.0 - h * h / 2.0 + h * h * h * h / 24.0).epsilon(1e-14));
    CHECK(s.omega == doctest::Approx(-w * (h - h * h * h / 6.0)).epsilon(1e-14));
}

TEST_CASE("convergence order") {
    const double T = 1.0;
    const double rk4_ratio = linear_error(IntegratorKind::RK4, 1e-3, T) / linear_error(IntegratorKind::RK4, 5e-4, T);
    const double euler_ratio =
        linear_error(IntegratorKind::Euler, 1e-3, T) / linear_error(IntegratorKind::Euler, 5e-4, T);
    CHECK(rk4_ratio > 14.0);
    CHECK(rk4_ratio < 18.0);
    CHECK(euler_ratio > 1.8);
    CHECK(euler_ratio < 2.2);
}

TEST_CASE("zero input at rest stays at rest") {
    PendulumParams p;
    p.b = 0.3;
    SimState s{};
    for (int i = 0; i < 1000; ++i) s = rk4_step(pendulum_rhs(Model::Nonlinear, p), s, 0.0, StepSize(1e-3));
    CHECK(s.theta == 0.0);
    CHECK(s.omega == 0.0);
}

TEST_CASE("divergence detection") {
    CHECK_NOTHROW(check_divergence({0.0, kDivergenceOmega, 0.0}));
    CHECK_THROWS_AS(check_divergence({0.0, std::nextafter(kDivergenceOmega, 2e6), 0.0}), IntegrationDiverged);
    CHECK_THROWS_AS(check_divergence({std::numeric_limits<double>::infinity(), 0.0, 0.0}), IntegrationDiverged);
    CHECK_THROWS_AS(check_divergence({0.0, std::numeric_limits<double>::quiet_NaN(), 0.0}), IntegrationDiverged);

    auto blowup = [](const SimState&, double) { return StateDeriv{0.0, 1e12}; };
    try {
        rk4_step(blowup, {0.1, 0.0, 0.0}, 0.0, StepSize(1e-3));
        FAIL("expected divergence");
    } catch (const IntegrationDiverged& e) {
        CHECK(e.state().omega == doctest::Approx(1e9));
    }
}

TEST_CASE("integrator names") {
    CHECK(to_string(IntegratorKind::RK4) == "rk4");
    CHECK(to_string(IntegratorKind::Euler) == "euler");
}

TEST_CASE("property: RK4 energy drift shrinks with dt^4") {
    PendulumParams p;
    auto drift = [&](double dt) {
        auto rhs = pendulum_rhs(Model::Nonlinear, p);
        SimState s{2.0, 0.0, 0.0};
        const double e0 = total_energy(p, s);
        double worst = 0.0;
        for (long k = 0; k < std::lround(2.0 / dt); ++k) {
            s = rk4_step(rhs, s, 0.0, StepSize(dt));
            worst = std::max(worst, std::abs(total_energy(p, s) - e0));
        }
        return worst;
    };
    const double ratio = drift(4e-3) / drift(2e-3);
    CHECK(ratio > 12.0);
    CHECK(ratio < 40.0);
}

}
