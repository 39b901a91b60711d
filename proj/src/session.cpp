#include "pendlab/session.hpp"

#include <algorithm>
#include <cmath>

#include "pendlab/errors.hpp"

namespace pendlab {

std::string_view to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Completed: return "Completed";
        case Outcome::Diverged: return "Diverged";
        case Outcome::Aborted: return "Aborted";
    }
    return "Unknown";
}

namespace {

int initial_adc(const ReferenceSource& src) {
    if (const auto* j = std::get_if<JoystickSource>(&src)) return j->initial_raw;
    return 512;
}

}  // namespace

Session::Session(ScenarioConfig config)
    : config_((config.validate(), std::move(config))),
      state_(config_.initial),
      controller_(config_.controller, config_.controller_options, config_.limits, config_.dt),
      noise_(config_.noise_spec()),
      latest_adc_(initial_adc(config_.reference)) {}

void Session::apply(const SessionCommand& command) {
    const bool closed = config_.mode == Mode::ClosedLoopReference;
    if (const auto* adc = std::get_if<AdcInput>(&command)) {
        if (!std::holds_alternative<JoystickSource>(config_.reference)) {
            throw ModeError("session input is not joystick-driven", "raw");
        }
        latest_adc_ = AdcReading(adc->raw);
    } else if (const auto* ref = std::get_if<ReferenceInput>(&command)) {
        if (!closed) throw ModeError("open-loop sessions take no reference", "r");
        if (!std::isfinite(ref->r)) throw ConfigError("must be finite", "r");
        config_.reference = ConstantReference{std::clamp(ref->r, kReferenceRange.lo, kReferenceRange.hi)};
    } else if (const auto* ctl = std::get_if<ControllerInput>(&command)) {
        if (!closed) throw ModeError("open-loop sessions have no controller", "controller");
        controller_.set_spec(ctl->spec);
        config_.controller = ctl->spec;
    } else if (const auto* fr = std::get_if<FrictionInput>(&command)) {
        PendulumParams next = config_.params;
        next.b = fr->b;
        next.validate();
        config_.params = next;
    }
}

std::optional<double> Session::aug_energy(const SimState& s, double r) const {
    if (config_.mode != Mode::ClosedLoopReference) return std::nullopt;
    if (const auto* bb = std::get_if<BangBangGains>(&config_.controller)) {
        return augmented_energy_bang(config_.params, s, r, bb->tau_max);
    }
    const double kp = std::visit(
        [](const auto& g) -> double {
            if constexpr (requires { g.kp; }) return g.kp;
            else return 0.0;
        },
        config_.controller);
    return augmented_energy_p(config_.params, s, r, kp);
}

Session::TickResult Session::tick() {
    const double t = sim_time(tick_);
    const double dt = config_.dt;
    const bool closed = config_.mode == Mode::ClosedLoopReference;

    double r = 0.0;
    double open_loop_torque = 0.0;
    if (closed) {
        const double raw_r = reference_at(config_.reference, t, latest_adc_);
        if (config_.reference_filter) {
            reference_filter_ = reference_filter_ ? lowpass_step(*reference_filter_, raw_r, dt)
                                                  : LowPassState{raw_r, config_.reference_filter_tau};
            r = reference_filter_->y;
        } else {
            r = raw_r;
        }
    } else if (std::holds_alternative<JoystickSource>(config_.reference)) {
        open_loop_torque = adc_to_range(latest_adc_, RangeMap{config_.limits.tau_min, config_.limits.tau_max});
    } else if (const auto* c = std::get_if<ConstantReference>(&config_.reference)) {
        open_loop_torque = c->r;
    } else if (const auto* s = std::get_if<SineReference>(&config_.reference)) {
        open_loop_torque = s->offset + s->amp * std::sin(2.0 * std::numbers::pi * s->freq * t);
    }

    const NoiseSample noise = noise_.sample();
    const double theta_meas = state_.theta + noise.theta;
    const double omega_meas = state_.omega + noise.omega;

    const double tau_cmd = closed ? controller_.update(r, theta_meas, omega_meas) : open_loop_torque;
    const double tau_sat = saturate(tau_cmd, config_.limits);
    const double d = disturbance_at(config_.disturbance, t);
    const double applied = tau_sat + noise.input + d;

    TickResult result;
    result.frame = TelemetryFrame{
        t, state_.theta, state_.omega, r, tau_cmd, tau_sat, d,
        total_energy(config_.params, state_), aug_energy(state_, r), theta_meas, omega_meas,
    };
    if (diverged_) {
        result.diverged = true;
        return result;
    }
    try {
        SimState next = integrate_step(config_.integrator, pendulum_rhs(config_.model, config_.params), state_,
                                       applied, StepSize(dt));
        next.t = sim_time(tick_ + 1);
        state_ = next;
        ++tick_;
    } catch (const IntegrationDiverged& e) {
        diverged_ = true;
        result.diverged = true;
        result.diagnostic = e.what();
    }
    return result;
}

TelemetryFrame Session::observe() const {
    Session scratch(*this);
    return scratch.tick().frame;
}

std::optional<PerfMetrics> record_metrics(const SessionRecord& record) {
    if (record.frames.empty() || record.config.mode != Mode::ClosedLoopReference) return std::nullopt;
    std::vector<double> t, theta, r;
    t.reserve(record.frames.size());
    theta.reserve(record.frames.size());
    r.reserve(record.frames.size());
    for (const auto& f : record.frames) {
        t.push_back(f.t);
        theta.push_back(f.theta);
        r.push_back(f.r);
    }
    return perf_metrics(t, theta, r);
}

SessionRecord run_headless(const ScenarioConfig& config, const InputLog& inputs) {
    config.validate();
    if (!config.duration) throw ConfigError("headless runs need a duration", "duration");

    SessionRecord record;
    record.config = config;
    Session session(config);
    const auto steps = static_cast<std::uint64_t>(std::llround(*config.duration / config.dt));
    record.frames.reserve(static_cast<std::size_t>(steps) + 1);

    std::size_t next_input = 0;
    for (std::uint64_t n = 0; n < steps; ++n) {
        for (; next_input < inputs.size() && inputs[next_input].tick <= n; ++next_input) {
            if (inputs[next_input].tick < n) throw ConfigError("input log is not ordered by tick", "inputs");
            session.apply(inputs[next_input].command);
        }
        auto result = session.tick();
        record.frames.push_back(result.frame);
        if (result.diverged) {
            record.outcome = Outcome::Diverged;
            record.diagnostic = result.diagnostic;
            break;
        }
    }
    if (record.outcome == Outcome::Completed) {
        record.frames.push_back(session.observe());
        record.metrics = record_metrics(record);
    }
    record.final_integral = session.controller().integral_term();
    return record;
}

}  // namespace pendlab
