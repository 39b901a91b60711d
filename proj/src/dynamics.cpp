#include "pendlab/dynamics.hpp"

#include <cmath>

#include "pendlab/errors.hpp"

namespace pendlab {

void PendulumParams::validate() const {
    if (!(std::isfinite(m) && m > 0.0)) throw ConfigError("mass must be > 0", "params.m");
    if (!(std::isfinite(ell) && ell > 0.0)) throw ConfigError("length must be > 0", "params.ell");
    if (!(std::isfinite(g) && g > 0.0)) throw ConfigError("gravity must be > 0", "params.g");
    if (!(std::isfinite(b) && b >= 0.0)) throw ConfigError("friction must be >= 0", "params.b");
}

double inertia(const PendulumParams& params) { return params.m * params.ell * params.ell; }

double gravity_scale(const PendulumParams& params) { return params.m * params.g * params.ell; }

double gravity_torque(const PendulumParams& params, double theta) {
    return gravity_scale(params) * std::sin(theta);
}

StateDeriv nonlinear_rhs(const PendulumParams& params, const SimState& state, double tau) {
    const double restoring = gravity_torque(params, state.theta);
    return {state.omega, (tau - params.b * state.omega - restoring) / inertia(params)};
}

StateDeriv linear_rhs(const PendulumParams& params, const SimState& state, double tau) {
    const double restoring = gravity_scale(params) * state.theta;
    return {state.omega, (tau - params.b * state.omega - restoring) / inertia(params)};
}

StateDeriv model_rhs(Model model, const PendulumParams& params, const SimState& state, double tau) {
    return model == Model::Linear ? linear_rhs(params, state, tau)
                                  : nonlinear_rhs(params, state, tau);
}

double total_energy(const PendulumParams& params, const SimState& state) {
    const double kinetic = 0.5 * inertia(params) * state.omega * state.omega;
    return kinetic - gravity_scale(params) * std::cos(state.theta);
}

}  // namespace pendlab
