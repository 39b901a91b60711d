#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pendlab/analysis.hpp"
#include "pendlab/controllers.hpp"
#include "pendlab/scenario.hpp"

namespace pendlab {

/// One simulated tick as seen by the scope.
struct TelemetryFrame {
    double t = 0.0;
    double theta = 0.0;
    double omega = 0.0;
    double r = 0.0;
    double tau_cmd = 0.0;
    double tau_sat = 0.0;
    double disturbance = 0.0;
    double energy = 0.0;
    std::optional<double> aug_energy;
    double theta_meas = 0.0;
    double omega_meas = 0.0;

    bool operator==(const TelemetryFrame&) const = default;
};

enum class Outcome { Completed, Diverged, Aborted };
std::string_view to_string(Outcome outcome);

struct SessionRecord {
    ScenarioConfig config;
    std::vector<TelemetryFrame> frames;
    std::optional<PerfMetrics> metrics;
    Outcome outcome = Outcome::Completed;
    std::string diagnostic;
    /// PID σ (or FPID ki·I^λ) at the end of the run.
    double final_integral = 0.0;
};

// Live inputs. They take effect at the start of the next tick.
struct AdcInput {
    int raw = 0;
    bool operator==(const AdcInput&) const = default;
};
struct ReferenceInput {
    double r = 0.0;
    bool operator==(const ReferenceInput&) const = default;
};
struct ControllerInput {
    ControllerSpec spec;
};
struct FrictionInput {
    double b = 0.0;
    bool operator==(const FrictionInput&) const = default;
};
using SessionCommand = std::variant<AdcInput, ReferenceInput, ControllerInput, FrictionInput>;

struct LoggedInput {
    std::uint64_t tick = 0; ///< applied before this tick ran
    SessionCommand command;
};
using InputLog = std::vector<LoggedInput>;

/// The simulation loop body. Per tick: acquire the reference (or torque),
/// low-pass the reference, form noisy measurements, run the controller,
/// saturate, add input noise and disturbance, integrate, emit the frame.
class Session {
public:
    explicit Session(ScenarioConfig config);

    /// Throws ConfigError if the command does not fit the session (an ADC
    /// frame without a joystick source, a controller change in open loop, ...).
    void apply(const SessionCommand& command);

    struct TickResult {
        TelemetryFrame frame;
        bool diverged = false;
        std::string diagnostic;
    };

    /// Frame for the current time, then advance one dt. On divergence the
    /// state is left untouched and `diverged` is set.
    TickResult tick();

    /// The frame `tick()` would emit now, without advancing anything.
    TelemetryFrame observe() const;

    std::uint64_t tick_index() const noexcept { return tick_; }
    const SimState& state() const noexcept { return state_; }
    const Controller& controller() const noexcept { return controller_; }
    const ScenarioConfig& config() const noexcept { return config_; }
    bool diverged() const noexcept { return diverged_; }

private:
    double sim_time(std::uint64_t n) const { return config_.initial.t + static_cast<double>(n) * config_.dt; }
    std::optional<double> aug_energy(const SimState& s, double r) const;

    ScenarioConfig config_;
    SimState state_;
    Controller controller_;
    NoiseStream noise_;
    AdcReading latest_adc_;
    std::optional<LowPassState> reference_filter_;
    std::uint64_t tick_ = 0;
    bool diverged_ = false;
};

/// Runs a duration-bounded scenario as fast as possible, replaying `inputs`
/// at their recorded ticks. Frames cover t_0..t_N inclusive.
SessionRecord run_headless(const ScenarioConfig& config, const InputLog& inputs = {});

/// Closed-loop step metrics for the recorded frames (empty for open loop or
/// an empty record).
std::optional<PerfMetrics> record_metrics(const SessionRecord& record);

}  // namespace pendlab
