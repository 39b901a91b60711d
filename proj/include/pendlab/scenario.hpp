#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pendlab/controllers.hpp"
#include "pendlab/dynamics.hpp"
#include "pendlab/integrators.hpp"
#include "pendlab/signal_chain.hpp"

namespace pendlab {

enum class Mode { OpenLoopTorque, ClosedLoopReference };
enum class Pacing { RealTime, AsFastAsPossible };

/// Full experiment description.
///
/// In closed-loop mode `reference` is the angle reference and `controller`
/// produces the torque. In open-loop mode `reference` is read as the torque
/// source: the joystick maps ADC counts onto [tau_min, tau_max], a constant or
/// sine source is taken directly in N·m.
struct ScenarioConfig {
    Mode mode = Mode::ClosedLoopReference;
    PendulumParams params;
    Model model = Model::Nonlinear;
    ControllerSpec controller = PIDGains{};
    ControllerOptions controller_options;
    ReferenceSource reference = ConstantReference{};
    bool reference_filter = true;
    double reference_filter_tau = 0.05; ///< [s]
    NoiseSpec noise;
    DisturbanceSpec disturbance = NoDisturbance{};
    IntegratorKind integrator = IntegratorKind::RK4;
    double dt = 1e-3;
    std::optional<double> duration = 10.0; ///< empty: run until stopped
    SimState initial;
    TorqueLimits limits;
    Pacing pacing = Pacing::AsFastAsPossible;
    std::uint64_t seed = 0;
    /// Telemetry is emitted every k-th tick; 0 picks the smallest k keeping
    /// the stream at or below 50 Hz.
    std::size_t telemetry_decimation = 0;

    void validate() const;
    std::size_t decimation() const;
    /// Noise spec with the scenario seed folded in.
    NoiseSpec noise_spec() const;
};

using Setting = std::pair<std::string, std::string>;

/// Sets one dotted key. Throws ConfigError naming the key on unknown keys,
/// malformed values, or gains that do not belong to the active controller.
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Applies settings last-wins, with discriminator keys (`mode`,
/// `controller.type`, `reference.type`, `disturbance.type`) first so that the
/// fields they select can follow in any order.
void apply_settings(ScenarioConfig& config, const std::vector<Setting>& settings);

/// Canonical settings for `config`; feeding them back reproduces it exactly.
std::vector<Setting> to_settings(const ScenarioConfig& config);

/// `key = value` lines, `#` comments. Validates the result.
ScenarioConfig parse_scenario(std::string_view text);
std::vector<Setting> parse_settings(std::string_view text);

/// Reads a scenario file. A CSV written by this library is accepted too: its
/// `#config` comment lines carry the resolved scenario.
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

std::string to_text(const ScenarioConfig& config);

/// FNV-1a 64 of the canonical text.
std::uint64_t config_hash(const ScenarioConfig& config);

/// True for keys whose value is a plain number (usable in sweeps).
bool is_numeric_key(std::string_view key);

/// Shortest round-trip decimal form.
std::string format_double(double value);
double parse_double(std::string_view text, std::string_view field);

std::string_view to_string(Mode mode);
std::string_view to_string(Pacing pacing);

}  // namespace pendlab
