#include "pendlab/controllers.hpp"

#include <algorithm>
#include <cmath>

#include "pendlab/errors.hpp"

namespace pendlab {

void TorqueLimits::validate() const {
    if (!std::isfinite(tau_min) || !std::isfinite(tau_max)) throw ConfigError("must be finite", "limits");
    if (!(tau_min < tau_max)) throw ConfigError("tau_min must be < tau_max", "limits.tau_min");
}

namespace {

void require_gain(double value, const char* field) {
    if (!(std::isfinite(value) && value >= 0.0)) throw ConfigError("gain must be >= 0", field);
}

void require_order(double value, const char* field) {
    if (!(value > 0.0 && value < 1.0)) throw ConfigError("order must lie in (0, 1)", field);
}

}  // namespace

void validate(const ControllerSpec& spec) {
    struct Visitor {
        void operator()(const BangBangGains& g) const {
            if (!(std::isfinite(g.tau_max) && g.tau_max > 0.0)) throw ConfigError("must be > 0", "controller.tau_max");
            require_gain(g.deadband, "controller.deadband");
        }
        void operator()(const PGains& g) const { require_gain(g.kp, "controller.kp"); }
        void operator()(const PDGains& g) const {
            require_gain(g.kp, "controller.kp");
            require_gain(g.kd, "controller.kd");
        }
        void operator()(const PIDGains& g) const {
            require_gain(g.kp, "controller.kp");
            require_gain(g.ki, "controller.ki");
            require_gain(g.kd, "controller.kd");
        }
        void operator()(const FPIDGains& g) const {
            require_gain(g.kp, "controller.kp");
            require_gain(g.ki, "controller.ki");
            require_gain(g.kd, "controller.kd");
            require_order(g.lambda, "controller.lambda");
            require_order(g.mu, "controller.mu");
            if (g.memory == 0) throw ConfigError("must be >= 1", "controller.memory");
        }
    };
    std::visit(Visitor{}, spec);
}

std::string_view controller_name(const ControllerSpec& spec) {
    static constexpr std::string_view names[] = {"bang_bang", "p", "pd", "pid", "fpid"};
    return names[spec.index()];
}

void ControllerOptions::validate() const {
    if (!(std::isfinite(derivative_filter_tau) && derivative_filter_tau >= 0.0)) {
        throw ConfigError("must be >= 0", "controller.derivative_filter_tau");
    }
}

double bang_bang(double r, double theta, double tau_max, double deadband) {
    const double e = r - theta;
    if (std::abs(e) <= deadband) return 0.0;
    return e > 0.0 ? tau_max : -tau_max;
}

double p_control(double kp, double r, double theta) { return kp * (r - theta); }

double pd_control(double kp, double kd, double r, double theta, double omega) {
    return kp * (r - theta) - kd * omega;
}

PidOutput pid_step(const PIDGains& gains, PidState state, double r, double theta, double omega, double dt,
                   std::optional<double> sigma_limit) {
    const double e = r - theta;
    state.sigma += gains.ki * e * dt;
    if (sigma_limit) state.sigma = std::clamp(state.sigma, -*sigma_limit, *sigma_limit);
    return {gains.kp * e + state.sigma - gains.kd * omega, state};
}

FpidState::FpidState(const FPIDGains& gains, double dt)
    : lambda_(gains.lambda),
      mu_(gains.mu),
      history_(dt, gains.memory),
      integral_(-gains.lambda, gains.memory - 1, dt),
      derivative_(gains.mu, gains.memory - 1, dt) {}

void FpidState::retune(const FPIDGains& gains) {
    if (gains.lambda == lambda_ && gains.mu == mu_ && gains.memory == history_.capacity()) return;
    const double dt = history_.dt();
    history_.set_capacity(gains.memory);
    integral_ = GLWeights(-gains.lambda, gains.memory - 1, dt);
    derivative_ = GLWeights(gains.mu, gains.memory - 1, dt);
    lambda_ = gains.lambda;
    mu_ = gains.mu;
}

double fpid_step(const FPIDGains& gains, FpidState& state, double r, double theta, double dt) {
    if (std::abs(dt - state.dt()) > 1e-12 * state.dt()) {
        throw ConfigError("controller dt does not match the error-history spacing", "dt");
    }
    state.retune(gains);
    const double e = r - theta;
    state.history_.push(e);
    state.last_integral_ = gl_apply(state.history_, state.integral_);
    state.last_derivative_ = gl_apply(state.history_, state.derivative_);
    return gains.kp * e + gains.ki * state.last_integral_ + gains.kd * state.last_derivative_;
}

double saturate(double tau, const TorqueLimits& limits) { return std::clamp(tau, limits.tau_min, limits.tau_max); }

Controller::Controller(ControllerSpec spec, ControllerOptions options, TorqueLimits limits, double dt)
    : spec_(std::move(spec)), options_(options), limits_(limits), dt_(dt) {
    validate(spec_);
    options_.validate();
    set_spec(spec_);
}

void Controller::set_spec(ControllerSpec spec) {
    validate(spec);
    const bool same_law = spec.index() == spec_.index();
    spec_ = std::move(spec);
    const auto* fpid = std::get_if<FPIDGains>(&spec_);
    if (!same_law || (fpid && !fpid_)) {
        pid_ = {};
        integral_term_ = 0.0;
        omega_filter_.reset();
        fpid_.reset();
        if (fpid) fpid_.emplace(*fpid, dt_);
    } else if (fpid) {
        fpid_->retune(*fpid);
    }
}

double Controller::derivative_omega(double omega_meas) {
    if (options_.derivative_filter_tau <= 0.0) return omega_meas;
    if (!omega_filter_) omega_filter_ = LowPassState{omega_meas, options_.derivative_filter_tau};
    omega_filter_ = lowpass_step(*omega_filter_, omega_meas, dt_);
    return omega_filter_->y;
}

double Controller::update(double r, double theta_meas, double omega_meas) {
    struct Visitor {
        Controller& self;
        double r, theta, omega;
        double operator()(const BangBangGains& g) const { return bang_bang(r, theta, g.tau_max, g.deadband); }
        double operator()(const PGains& g) const { return p_control(g.kp, r, theta); }
        double operator()(const PDGains& g) const {
            return pd_control(g.kp, g.kd, r, theta, self.derivative_omega(omega));
        }
        double operator()(const PIDGains& g) const {
            std::optional<double> limit;
            if (self.options_.integrator_clamp) limit = 2.0 * self.limits_.tau_max;
            const PidOutput out = pid_step(g, self.pid_, r, theta, self.derivative_omega(omega), self.dt_, limit);
            self.pid_ = out.state;
            self.integral_term_ = out.state.sigma;
            return out.torque;
        }
        double operator()(const FPIDGains& g) const {
            const double tau = fpid_step(g, *self.fpid_, r, theta, self.dt_);
            self.integral_term_ = g.ki * self.fpid_->last_integral();
            return tau;
        }
    };
    return std::visit(Visitor{*this, r, theta_meas, omega_meas}, spec_);
}

}  // namespace pendlab
