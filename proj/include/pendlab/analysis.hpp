#pragma once

#include <optional>
#include <span>
#include <stdexcept>

#include "pendlab/dynamics.hpp"

namespace pendlab {

// Energy diagnostics and the closed-loop equilibrium predictions they imply.
// Everything here is a pure function of parameters or recorded samples.

/// E + τ_max·|θ − r|, non-increasing under bang-bang control with constant r.
double augmented_energy_bang(const PendulumParams& params, const SimState& state, double r, double tau_max);

/// E + ½·kp·(θ − r)², non-increasing under P and PD control with constant r.
double augmented_energy_p(const PendulumParams& params, const SimState& state, double r, double kp);

/// Bang-bang can only rest at the inverted position when τ_max > m·g·ℓ.
bool bang_stabilizable_at_pi(const PendulumParams& params, double tau_max);

struct EquilibriumPrediction {
    double theta_star = 0.0;
    std::optional<double> sigma_star; ///< PID integrator at rest [N·m]
    double residual = 0.0;            ///< equilibrium equation evaluated at θ* [N·m]
};

class NoEquilibriumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root of kp·(r − θ) = m·g·ℓ·sin θ in [r − π, r + π] nearest to r.
/// Sign changes are located on a 1e-3 rad grid and refined by bisection.
EquilibriumPrediction p_equilibrium(const PendulumParams& params, double kp, double r);

/// θ* = r and σ* = m·g·ℓ·sin r − d0 for a constant input disturbance d0.
EquilibriumPrediction pid_equilibrium(const PendulumParams& params, double r, double disturbance_d0);

/// g ≈ 4π²ℓ/T²
double estimate_g(double period, double ell);

class NotOscillatingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mean spacing of rising zero crossings of θ − mean(θ), interpolated
/// linearly between samples. Needs at least three crossings.
double measure_period(std::span<const double> t, std::span<const double> theta);

struct PerfMetrics {
    double overshoot = 0.0;                 ///< [rad]
    std::optional<double> settling_time_2pct; ///< [s]; empty when never settled
    double rms_error = 0.0;                 ///< final 20 % of samples [rad]
    double steady_state_error = 0.0;        ///< mean |θ − r| over the final 10 % [rad]

    bool settled() const noexcept { return settling_time_2pct.has_value(); }
};

/// Step-response metrics against an aligned reference trace. The settling
/// band is 2 % of |r_end − θ_0|, or 0.02 rad when that step is zero.
PerfMetrics perf_metrics(std::span<const double> t, std::span<const double> theta, std::span<const double> r);

/// Time (relative to t[0]) after which |θ − r| < band holds for every later
/// sample; empty if the last sample is outside the band.
std::optional<double> band_entry_time(std::span<const double> t, std::span<const double> theta,
                                      std::span<const double> r, double band);

}  // namespace pendlab
