#include "pendlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace pendlab {

double augmented_energy_bang(const PendulumParams& params, const SimState& state, double r, double tau_max) {
    return total_energy(params, state) + tau_max * std::abs(state.theta - r);
}

double augmented_energy_p(const PendulumParams& params, const SimState& state, double r, double kp) {
    const double e = state.theta - r;
    return total_energy(params, state) + 0.5 * kp * e * e;
}

bool bang_stabilizable_at_pi(const PendulumParams& params, double tau_max) {
    return tau_max > gravity_scale(params);
}

EquilibriumPrediction p_equilibrium(const PendulumParams& params, double kp, double r) {
    if (!(kp > 0.0)) throw std::invalid_argument("p_equilibrium needs kp > 0");
    const double mgl = gravity_scale(params);
    const auto f = [&](double theta) { return kp * (r - theta) - mgl * std::sin(theta); };

    constexpr double kGrid = 1e-3;
    const double lo = r - std::numbers::pi;
    const auto cells = static_cast<long>(std::ceil(2.0 * std::numbers::pi / kGrid));

    std::optional<double> best;
    const auto consider = [&](double root) {
        if (!best || std::abs(root - r) < std::abs(*best - r)) best = root;
    };

    double a = lo;
    double fa = f(a);
    for (long i = 1; i <= cells; ++i) {
        const double b = std::min(lo + static_cast<double>(i) * kGrid, r + std::numbers::pi);
        const double fb = f(b);
        if (fa == 0.0) {
            consider(a);
        } else if (fa * fb < 0.0) {
            double left = a, right = b, fl = fa;
            double mid = 0.5 * (left + right);
            for (int it = 0; it < 200; ++it) {
                mid = 0.5 * (left + right);
                const double fm = f(mid);
                if (std::abs(fm) < 1e-12 || right - left < 1e-15) break;
                if ((fm < 0.0) == (fl < 0.0)) {
                    left = mid;
                    fl = fm;
                } else {
                    right = mid;
                }
            }
            consider(mid);
        }
        a = b;
        fa = fb;
    }
    if (fa == 0.0) consider(a);
    if (!best) throw NoEquilibriumError("no equilibrium of the P loop in [r - pi, r + pi]");
    return {*best, std::nullopt, f(*best)};
}

EquilibriumPrediction pid_equilibrium(const PendulumParams& params, double r, double disturbance_d0) {
    const double sigma = gravity_torque(params, r) - disturbance_d0;
    // mgℓ sin θ* = kp·0 + σ* + d0 holds exactly at θ* = r.
    return {r, sigma, gravity_torque(params, r) - sigma - disturbance_d0};
}

double estimate_g(double period, double ell) {
    if (!(period > 0.0 && ell > 0.0)) throw std::invalid_argument("estimate_g needs period > 0 and ell > 0");
    return 4.0 * std::numbers::pi * std::numbers::pi * ell / (period * period);
}

double measure_period(std::span<const double> t, std::span<const double> theta) {
    if (t.size() != theta.size()) throw std::invalid_argument("time and angle traces differ in length");
    if (theta.size() < 2) throw NotOscillatingError("trajectory too short to oscillate");
    const double mean = std::accumulate(theta.begin(), theta.end(), 0.0) / static_cast<double>(theta.size());

    std::vector<double> crossings;
    for (std::size_t i = 1; i < theta.size(); ++i) {
        const double prev = theta[i - 1] - mean;
        const double cur = theta[i] - mean;
        if (prev < 0.0 && cur >= 0.0) {
            const double frac = -prev / (cur - prev);
            crossings.push_back(t[i - 1] + frac * (t[i] - t[i - 1]));
        }
    }
    if (crossings.size() < 3) throw NotOscillatingError("fewer than three rising crossings");
    return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

std::optional<double> band_entry_time(std::span<const double> t, std::span<const double> theta,
                                      std::span<const double> r, double band) {
    if (t.empty()) return std::nullopt;
    std::size_t i = t.size();
    while (i > 0 && std::abs(theta[i - 1] - r[i - 1]) < band) --i;
    if (i == t.size()) return std::nullopt;
    return t[i] - t[0];
}

PerfMetrics perf_metrics(std::span<const double> t, std::span<const double> theta, std::span<const double> r) {
    if (t.empty()) throw std::invalid_argument("perf_metrics on an empty trajectory");
    if (t.size() != theta.size() || t.size() != r.size()) throw std::invalid_argument("traces differ in length");
    const std::size_t n = t.size();

    PerfMetrics out;
    const double step = r.back() - theta.front();
    const double direction = step > 0.0 ? 1.0 : (step < 0.0 ? -1.0 : 0.0);
    if (direction != 0.0) {
        for (std::size_t i = 0; i < n; ++i) out.overshoot = std::max(out.overshoot, direction * (theta[i] - r[i]));
    }

    const double band = step != 0.0 ? 0.02 * std::abs(step) : 0.02;
    out.settling_time_2pct = band_entry_time(t, theta, r, band);

    const std::size_t rms_from = n - std::max<std::size_t>(1, n / 5);
    double sq = 0.0;
    for (std::size_t i = rms_from; i < n; ++i) sq += (theta[i] - r[i]) * (theta[i] - r[i]);
    out.rms_error = std::sqrt(sq / static_cast<double>(n - rms_from));

    const std::size_t sse_from = n - std::max<std::size_t>(1, n / 10);
    double abs_sum = 0.0;
    for (std::size_t i = sse_from; i < n; ++i) abs_sum += std::abs(theta[i] - r[i]);
    out.steady_state_error = abs_sum / static_cast<double>(n - sse_from);
    return out;
}

}  // namespace pendlab
