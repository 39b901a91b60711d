#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "pendlab/errors.hpp"
#include "pendlab/fractional.hpp"

using namespace pendlab;

namespace {

// (-1)^j C(alpha, j) from the Gamma function, independent of the recurrence.
double binomial_weight(double alpha, int j) {
    if (std::abs(alpha - std::round(alpha)) < 1e-12 && j > alpha && alpha >= 0) return 0.0;
    const double c = std::tgamma(alpha + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(alpha - j + 1.0));
    return (j % 2 == 0 ? 1.0 : -1.0) * c;
}

SampleWindow sampled(double dt, std::size_t n, auto&& f) {
    SampleWindow w(dt, n);
    for (std::size_t k = 0; k < n; ++k) w.push(f(static_cast<double>(k) * dt));
    return w;
}

const double kTwoOverRootPi = 2.0 / std::sqrt(std::numbers::pi);

}  // namespace

TEST_SUITE("fractional") {

TEST_CASE("first weights for order 1/2") {
    const auto table = gl_weights(0.5, 3, 1e-3);
    auto w = table.weights();
    REQUIRE(w.size() == 4);
    CHECK(w[0] == 1.0);
    CHECK(w[1] == doctest::Approx(-0.5));
    CHECK(w[2] == doctest::Approx(-0.125));
    CHECK(w[3] == doctest::Approx(-0.0625));
}

TEST_CASE("integer orders reduce to differences and sums") {
    const auto diff = gl_weights(1.0, 5, 0.1);
    auto d1 = diff.weights();
    CHECK(d1[0] == 1.0);
    CHECK(d1[1] == -1.0);
    for (std::size_t j = 2; j < d1.size(); ++j) CHECK(d1[j] == 0.0);
    const auto sum = gl_weights(-1.0, 5, 0.1);
    auto i1 = sum.weights();
    for (double w : i1) CHECK(w == doctest::Approx(1.0));
    CHECK(gl_weights(-1.0, 5, 0.1).scale() == doctest::Approx(0.1));
    CHECK(gl_weights(0.5, 5, 0.01).scale() == doctest::Approx(10.0));
}

TEST_CASE("property: recurrence agrees with the Gamma-function binomial") {
    for (double alpha : {0.1, 0.5, 0.999, -0.3, -0.5, -0.999, 1.5}) {
        const auto table = gl_weights(alpha, 40, 1e-3);
        auto w = table.weights();
        for (int j = 0; j <= 40; ++j)
            CHECK(w[static_cast<std::size_t>(j)] ==
                  doctest::Approx(binomial_weight(alpha, j)).epsilon(1e-10).scale(1e-12));
    }
}

TEST_CASE("half derivative of t and half integral of 1 at t = 1") {
    const double dt = 1e-3;
    const std::size_t n = 1001;  // samples at t = 0 .. 1
    auto ramp = sampled(dt, n, [](double t) { return t; });
    auto one = sampled(dt, n, [](double) { return 1.0; });
    CHECK(frac_derivative(ramp, 0.5) == doctest::Approx(kTwoOverRootPi).epsilon(0.02));
    CHECK(frac_integral(one, 0.5) == doctest::Approx(kTwoOverRootPi).epsilon(0.02));
    // tighter: GL is first order, so the error at this dt is well below 1 %
    CHECK(frac_derivative(ramp, 0.5) == doctest::Approx(kTwoOverRootPi).epsilon(2e-3));
    CHECK(frac_integral(one, 0.5) == doctest::Approx(kTwoOverRootPi).epsilon(2e-3));
}

TEST_CASE("half derivative of a constant decays like 1/sqrt(pi t)") {
    const double dt = 1e-3;
    auto one = sampled(dt, 2001, [](double) { return 1.0; });
    CHECK(frac_derivative(one, 0.5) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi * 2.0)).epsilon(5e-3));
}

TEST_CASE("orders near one approach the ordinary operators") {
    const double dt = 1e-3;
    auto ramp = sampled(dt, 1001, [](double t) { return 3.0 * t; });
    CHECK(frac_derivative(ramp, 0.999) == doctest::Approx(3.0).epsilon(0.01));
    auto one = sampled(dt, 1001, [](double) { return 2.0; });
    CHECK(frac_integral(one, 0.999) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("sliding window keeps only the most recent samples") {
    SampleWindow w(0.1, 3);
    for (int k = 1; k <= 5; ++k) w.push(k);
    CHECK(w.size() == 3);
    CHECK(w.back(0) == 5.0);
    CHECK(w.back(2) == 3.0);
    w.set_capacity(2);
    CHECK(w.size() == 2);
    CHECK(w.back(1) == 4.0);
    w.clear();
    CHECK(w.empty());
}

TEST_CASE("short memory equals the operator over the truncated history") {
    const double dt = 1e-2;
    SampleWindow full(dt, 100), short_memory(dt, 20);
    for (int k = 0; k < 100; ++k) {
        full.push(std::sin(0.1 * k));
        short_memory.push(std::sin(0.1 * k));
    }
    SampleWindow tail(dt, 20);
    for (int k = 80; k < 100; ++k) tail.push(std::sin(0.1 * k));
    CHECK(frac_integral(short_memory, 0.4) == frac_integral(tail, 0.4));
    CHECK(frac_integral(short_memory, 0.4) != frac_integral(full, 0.4));
}

TEST_CASE("errors") {
    SampleWindow empty(1e-3, 10);
    CHECK_THROWS(frac_derivative(empty, 0.5));
    SampleWindow w(1e-3, 10);
    w.push(1.0);
    CHECK_THROWS_AS(gl_apply(w, gl_weights(0.5, 3, 2e-3)), ConfigError);
}

TEST_CASE("property: operators are linear") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double dt = 1e-3;
    for (int trial = 0; trial < 20; ++trial) {
        SampleWindow x(dt, 200), y(dt, 200), z(dt, 200);
        const double a = u(rng), b = u(rng);
        for (int k = 0; k < 200; ++k) {
            const double xv = u(rng), yv = u(rng);
            x.push(xv);
            y.push(yv);
            z.push(a * xv + b * yv);
        }
        for (double order : {0.3, 0.7}) {
            CHECK(frac_derivative(z, order) ==
                  doctest::Approx(a * frac_derivative(x, order) + b * frac_derivative(y, order)).scale(1.0));
            CHECK(frac_integral(z, order) ==
                  doctest::Approx(a * frac_integral(x, order) + b * frac_integral(y, order)).scale(1.0));
        }
    }
}

}
