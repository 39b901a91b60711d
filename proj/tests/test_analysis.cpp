#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pendlab/analysis.hpp"

using namespace pendlab;
using std::numbers::pi;

namespace {

// Newton on f(x) = kp (r - x) - mgl sin x from x = r; independent of the
// library's grid-and-bisection search.
double newton_root(double kp, double r, double mgl) {
    double x = r;
    for (int i = 0; i < 100; ++i) {
        const double f = kp * (r - x) - mgl * std::sin(x);
        const double df = -kp - mgl * std::cos(x);
        x -= f / df;
    }
    return x;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("P-control rest angle") {
    PendulumParams p;
    auto eq = p_equilibrium(p, 2.0, pi / 2);
    CHECK(eq.theta_star == doctest::Approx(newton_root(2.0, pi / 2, 0.3924)).epsilon(1e-10));
    CHECK(eq.theta_star == doctest::Approx(1.378).epsilon(1e-3));
    CHECK(std::abs(eq.residual) < 1e-9);
    CHECK_FALSE(eq.sigma_star);
    CHECK(p_equilibrium(p, 2.0, pi).theta_star == doctest::Approx(pi).epsilon(1e-12));
    CHECK(p_equilibrium(p, 2.0, 0.0).theta_star == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("property: P rest angle solves the balance equation") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> kp_dist(0.5, 20.0), r_dist(-pi, pi);
    PendulumParams p;
    for (int i = 0; i < 100; ++i) {
        const double kp = kp_dist(rng), r = r_dist(rng);
        auto eq = p_equilibrium(p, kp, r);
        CHECK(std::abs(kp * (r - eq.theta_star) - 0.3924 * std::sin(eq.theta_star)) < 1e-9);
        CHECK(std::abs(eq.theta_star - r) <= pi);
        // stiff loops sit close to the reference
        if (kp > 10.0) CHECK(std::abs(eq.theta_star - r) < 0.3924 / kp + 1e-9);
    }
}

TEST_CASE("PID rest point") {
    PendulumParams p;
    auto eq = pid_equilibrium(p, 1.0, 0.2);
    CHECK(eq.theta_star == 1.0);
    REQUIRE(eq.sigma_star);
    CHECK(*eq.sigma_star == doctest::Approx(0.3924 * std::sin(1.0) - 0.2));
}

TEST_CASE("augmented energies") {
    PendulumParams p;
    SimState s{0.5, 2.0, 0.0};
    const double e = total_energy(p, s);
    CHECK(augmented_energy_bang(p, s, pi, 5.0) == doctest::Approx(e + 5.0 * (pi - 0.5)));
    CHECK(augmented_energy_p(p, s, pi, 2.0) == doctest::Approx(e + 0.5 * 2.0 * (pi - 0.5) * (pi - 0.5)));
    CHECK(bang_stabilizable_at_pi(p, 5.0));
    CHECK_FALSE(bang_stabilizable_at_pi(p, 0.3));
}

TEST_CASE("g from the small-oscillation period") {
    const double ell = 0.2, g = 9.81;
    CHECK(estimate_g(2 * pi * std::sqrt(ell / g), ell) == doctest::Approx(g));
}

TEST_CASE("period of a sampled sinusoid") {
    const double T = 0.8973, dt = 1e-3;
    std::vector<double> t, x;
    for (int k = 0; k < 5000; ++k) {
        t.push_back(k * dt);
        x.push_back(0.3 + 0.01 * std::sin(2 * pi * k * dt / T + 0.4));
    }
    CHECK(measure_period(t, x) == doctest::Approx(T).epsilon(1e-5));
    std::vector<double> t_short(t.begin(), t.begin() + 1000), x_short(x.begin(), x.begin() + 1000);
    CHECK_THROWS_AS(measure_period(t_short, x_short), NotOscillatingError);
    std::vector<double> flat(t.size(), 1.0);
    CHECK_THROWS_AS(measure_period(t, flat), NotOscillatingError);
}

TEST_CASE("metrics of a first-order step response") {
    // theta = 1 - exp(-t/tau): no overshoot, 2 % band entered at tau ln 50
    const double tau = 0.5, dt = 1e-3;
    std::vector<double> t, th, r;
    for (int k = 0; k <= 10000; ++k) {
        t.push_back(k * dt);
        th.push_back(1.0 - std::exp(-k * dt / tau));
        r.push_back(1.0);
    }
    auto m = perf_metrics(t, th, r);
    CHECK(m.overshoot == 0.0);
    REQUIRE(m.settled());
    CHECK(*m.settling_time_2pct == doctest::Approx(tau * std::log(50.0)).epsilon(2e-3));
    CHECK(m.rms_error < 1e-6);
    CHECK(m.steady_state_error < 1e-7);
}

TEST_CASE("metrics of an underdamped response") {
    // theta = 1 - exp(-z w t)(cos(wd t) + z w / wd sin(wd t)); peak overshoot exp(-z pi / sqrt(1 - z^2))
    const double z = 0.3, w = 4.0, wd = w * std::sqrt(1 - z * z), dt = 1e-3;
    std::vector<double> t, th, r;
    for (int k = 0; k <= 20000; ++k) {
        const double tt = k * dt;
        t.push_back(tt);
        th.push_back(1.0 - std::exp(-z * w * tt) * (std::cos(wd * tt) + z * w / wd * std::sin(wd * tt)));
        r.push_back(1.0);
    }
    auto m = perf_metrics(t, th, r);
    CHECK(m.overshoot == doctest::Approx(std::exp(-z * pi / std::sqrt(1 - z * z))).epsilon(1e-4));
    CHECK(m.settled());
}

TEST_CASE("never settling and band entry") {
    std::vector<double> t{0, 1, 2, 3, 4}, th{0, 0.5, 0.97, 0.99, 1.2}, r(5, 1.0);
    auto m = perf_metrics(t, th, r);
    CHECK_FALSE(m.settled());
    std::vector<double> th2{0, 0.5, 0.97, 1.01, 0.995};
    auto entry = band_entry_time(t, th2, r, 0.05);
    REQUIRE(entry);
    CHECK(*entry == 2.0);
    CHECK_FALSE(band_entry_time(t, th, r, 0.05));
}

}
