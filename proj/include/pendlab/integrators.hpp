#pragma once

#include <stdexcept>
#include <string_view>

#include "pendlab/dynamics.hpp"

namespace pendlab {

enum class IntegratorKind { Euler, RK4 };

/// Fixed integration step, 0 < dt ≤ 0.1 s.
class StepSize {
public:
    static constexpr double kMax = 0.1;

    explicit StepSize(double dt);
    double value() const noexcept { return dt_; }

private:
    double dt_;
};

/// |ω| beyond this is treated as a blown-up integration.
inline constexpr double kDivergenceOmega = 1e6;

class IntegrationDiverged : public std::runtime_error {
public:
    explicit IntegrationDiverged(const SimState& offending);
    const SimState& state() const noexcept { return state_; }

private:
    SimState state_;
};

/// Throws IntegrationDiverged if any component is non-finite or |ω| > 1e6.
void check_divergence(const SimState& next);

/// `rhs(state, tau)` returns the StateDeriv. τ is held over the whole step.
template <class Rhs>
SimState euler_step(Rhs&& rhs, const SimState& s, double tau, StepSize step) {
    const double dt = step.value();
    const StateDeriv d = rhs(s, tau);
    SimState next{s.theta + dt * d.dtheta, s.omega + dt * d.domega, s.t + dt};
    check_divergence(next);
    return next;
}

template <class Rhs>
SimState rk4_step(Rhs&& rhs, const SimState& s, double tau, StepSize step) {
    const double dt = step.value();
    const double half = 0.5 * dt;
    const StateDeriv k1 = rhs(s, tau);
    const StateDeriv k2 = rhs(SimState{s.theta + half * k1.dtheta, s.omega + half * k1.domega, s.t + half}, tau);
    const StateDeriv k3 = rhs(SimState{s.theta + half * k2.dtheta, s.omega + half * k2.domega, s.t + half}, tau);
    const StateDeriv k4 = rhs(SimState{s.theta + dt * k3.dtheta, s.omega + dt * k3.domega, s.t + dt}, tau);
    SimState next{
        s.theta + dt / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta),
        s.omega + dt / 6.0 * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega),
        s.t + dt,
    };
    check_divergence(next);
    return next;
}

template <class Rhs>
SimState integrate_step(IntegratorKind kind, Rhs&& rhs, const SimState& s, double tau, StepSize step) {
    return kind == IntegratorKind::Euler ? euler_step(rhs, s, tau, step) : rk4_step(rhs, s, tau, step);
}

/// Binds a pendulum model to the `rhs(state, tau)` shape the steppers expect.
inline auto pendulum_rhs(Model model, const PendulumParams& params) {
    return [model, params](const SimState& s, double tau) { return model_rhs(model, params, s, tau); };
}

std::string_view to_string(IntegratorKind kind);

}  // namespace pendlab
