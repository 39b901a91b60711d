#pragma once

#include <array>

namespace pendlab {

/// Physical constants of the actuated, damped point-mass pendulum.
///
/// Defaults are the lab values: 0.2 kg bob on a 0.20 m rod, g = 9.81 m/s²,
/// frictionless. Angles are measured from the downward vertical, so θ = 0 is
/// the stable equilibrium and θ = π the inverted one.
struct PendulumParams {
    double m = 0.2;    ///< mass [kg]
    double ell = 0.20; ///< rod length [m]
    double g = 9.81;   ///< gravity [m/s²]
    double b = 0.0;    ///< viscous friction [N·m·s/rad]

    /// Throws ConfigError unless m, ell, g > 0 and b ≥ 0 (all finite).
    void validate() const;
};

/// Friction presets used by the lab sweeps (zero, low, moderate, intense).
inline constexpr std::array<double, 4> kFrictionPresets{0.0, 0.1, 0.5, 1.0};

/// Continuous state. θ is kept unwrapped.
struct SimState {
    double theta = 0.0; ///< [rad]
    double omega = 0.0; ///< [rad/s]
    double t = 0.0;     ///< [s]
};

struct StateDeriv {
    double dtheta = 0.0; ///< [rad/s]
    double domega = 0.0; ///< [rad/s²]
};

enum class Model { Nonlinear, Linear };

/// J = m·ℓ²
double inertia(const PendulumParams& params);

/// m·g·ℓ, the peak gravity torque.
double gravity_scale(const PendulumParams& params);

/// Restoring torque magnitude m·g·ℓ·sin θ.
double gravity_torque(const PendulumParams& params, double theta);

/// J θ̈ + b θ̇ + m g ℓ sin θ = τ in first-order form.
StateDeriv nonlinear_rhs(const PendulumParams& params, const SimState& state, double tau);

/// Small-angle model (sin θ → θ) with the same friction and torque terms.
StateDeriv linear_rhs(const PendulumParams& params, const SimState& state, double tau);

StateDeriv model_rhs(Model model, const PendulumParams& params, const SimState& state, double tau);

/// ½ J ω² − m g ℓ cos θ
double total_energy(const PendulumParams& params, const SimState& state);

}  // namespace pendlab
