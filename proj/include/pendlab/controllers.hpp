#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>

#include "pendlab/fractional.hpp"
#include "pendlab/signal_chain.hpp"

namespace pendlab {

/// Actuator torque range [N·m].
struct TorqueLimits {
    double tau_min = -5.0;
    double tau_max = 5.0;

    void validate() const;
};

struct BangBangGains {
    double tau_max = 5.0;  ///< [N·m]
    double deadband = 0.0; ///< |r − θ| ≤ deadband yields zero torque [rad]
};
struct PGains {
    double kp = 2.0;
};
struct PDGains {
    double kp = 2.0;
    double kd = 0.2;
};
struct PIDGains {
    double kp = 2.0;
    double ki = 1.0;
    double kd = 0.2;
};
struct FPIDGains {
    double kp = 2.0;
    double ki = 1.0;
    double kd = 0.2;
    double lambda = 0.5; ///< integral order, (0, 1)
    double mu = 0.5;     ///< derivative order, (0, 1)
    std::size_t memory = 2000; ///< GL window length [samples]
};

using ControllerSpec = std::variant<BangBangGains, PGains, PDGains, PIDGains, FPIDGains>;

/// Throws ConfigError naming the offending `controller.*` field.
void validate(const ControllerSpec& spec);
std::string_view controller_name(const ControllerSpec& spec);

struct ControllerOptions {
    /// Time constant of the first-order filter on the measured ω fed to the
    /// D-action of PD/PID; 0 disables the filter.
    double derivative_filter_tau = 0.0;
    /// Clamp the PID integrator to |σ| ≤ 2·τ_max.
    bool integrator_clamp = false;

    void validate() const;
};

/// τ_max·sgn(r − θ), with sgn(0) = 0 (widened to |r − θ| ≤ deadband).
double bang_bang(double r, double theta, double tau_max, double deadband = 0.0);
double p_control(double kp, double r, double theta);
/// kp·(r − θ) − kd·ω; no ṙ term.
double pd_control(double kp, double kd, double r, double theta, double omega);

struct PidState {
    double sigma = 0.0; ///< integrator [N·m]
};

struct PidOutput {
    double torque;
    PidState state;
};

/// σ' = σ + ki·(r − θ)·dt, τ = kp·(r − θ) + σ' − kd·ω.
/// `sigma_limit`, when set, clamps |σ'|.
PidOutput pid_step(const PIDGains& gains, PidState state, double r, double theta, double omega, double dt,
                   std::optional<double> sigma_limit = std::nullopt);

/// Error history and cached GL tables of a fractional PID.
class FpidState {
public:
    FpidState(const FPIDGains& gains, double dt);

    /// Rebuilds weight tables if orders or memory changed; history is kept.
    void retune(const FPIDGains& gains);

    const SampleWindow& history() const noexcept { return history_; }
    double dt() const noexcept { return history_.dt(); }
    /// I^λ[e] and D^μ[e] from the most recent step.
    double last_integral() const noexcept { return last_integral_; }
    double last_derivative() const noexcept { return last_derivative_; }

private:
    friend double fpid_step(const FPIDGains&, FpidState&, double, double, double);

    double lambda_;
    double mu_;
    SampleWindow history_;
    GLWeights integral_;
    GLWeights derivative_;
    double last_integral_ = 0.0;
    double last_derivative_ = 0.0;
};

/// Appends e = r − θ and returns kp·e + ki·I^λ[e] + kd·D^μ[e]. The state must
/// have been built for the same dt (ConfigError otherwise).
double fpid_step(const FPIDGains& gains, FpidState& state, double r, double theta, double dt);

double saturate(double tau, const TorqueLimits& limits);

/// Stateful controller used by the session loop: wraps the control laws,
/// integrator/history state and the optional derivative filter.
class Controller {
public:
    Controller(ControllerSpec spec, ControllerOptions options, TorqueLimits limits, double dt);

    /// Commanded (unsaturated) torque from reference and measured state.
    double update(double r, double theta_meas, double omega_meas);

    /// Applies at the next update. Switching law resets σ and history;
    /// changing gains within the same law keeps them.
    void set_spec(ControllerSpec spec);

    const ControllerSpec& spec() const noexcept { return spec_; }
    /// PID integrator, or the fractional-integral term ki·I^λ[e] for FPID as
    /// of the last update; 0 for laws without integral action.
    double integral_term() const noexcept { return integral_term_; }

private:
    double derivative_omega(double omega_meas);

    ControllerSpec spec_;
    ControllerOptions options_;
    TorqueLimits limits_;
    double dt_;
    PidState pid_;
    std::optional<FpidState> fpid_;
    std::optional<LowPassState> omega_filter_;
    double integral_term_ = 0.0;
};

}  // namespace pendlab
