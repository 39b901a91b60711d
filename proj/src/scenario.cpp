#include "pendlab/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pendlab/errors.hpp"

namespace pendlab {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_plain_double(std::string_view text, std::string_view field) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("expected a number, got '" + std::string(text) + "'", std::string(field));
    }
    return value;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view field) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("expected a non-negative integer, got '" + std::string(text) + "'", std::string(field));
    }
    return value;
}

bool parse_bool(std::string_view text, std::string_view field) {
    if (text == "true" || text == "on" || text == "1") return true;
    if (text == "false" || text == "off" || text == "0") return false;
    throw ConfigError("expected true or false, got '" + std::string(text) + "'", std::string(field));
}

int parse_int(std::string_view text, std::string_view field) {
    int value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("expected an integer, got '" + std::string(text) + "'", std::string(field));
    }
    return value;
}

// Gains shared between controller laws survive a change of controller.type.
struct GainCarry {
    std::optional<double> kp, ki, kd;
};

GainCarry carry_of(const ControllerSpec& spec) {
    return std::visit(
        [](const auto& g) {
            GainCarry c;
            if constexpr (requires { g.kp; }) c.kp = g.kp;
            if constexpr (requires { g.ki; }) c.ki = g.ki;
            if constexpr (requires { g.kd; }) c.kd = g.kd;
            return c;
        },
        spec);
}

template <class Gains>
Gains with_carry(Gains g, const GainCarry& c) {
    if constexpr (requires { g.kp; }) if (c.kp) g.kp = *c.kp;
    if constexpr (requires { g.ki; }) if (c.ki) g.ki = *c.ki;
    if constexpr (requires { g.kd; }) if (c.kd) g.kd = *c.kd;
    return g;
}

ControllerSpec controller_of_type(std::string_view type, const ControllerSpec& current) {
    const GainCarry carry = carry_of(current);
    if (type == "bang_bang") return BangBangGains{};
    if (type == "p") return with_carry(PGains{}, carry);
    if (type == "pd") return with_carry(PDGains{}, carry);
    if (type == "pid") return with_carry(PIDGains{}, carry);
    if (type == "fpid") return with_carry(FPIDGains{}, carry);
    throw ConfigError("unknown controller type '" + std::string(type) + "'", "controller.type");
}

void set_controller_field(ControllerSpec& spec, std::string_view field, std::string_view key,
                          std::string_view value) {
    const bool handled = std::visit(
        [&](auto& g) {
            if constexpr (requires { g.tau_max; }) {
                if (field == "tau_max") return g.tau_max = parse_double(value, key), true;
                if (field == "deadband") return g.deadband = parse_double(value, key), true;
            }
            if constexpr (requires { g.kp; }) {
                if (field == "kp") return g.kp = parse_double(value, key), true;
            }
            if constexpr (requires { g.ki; }) {
                if (field == "ki") return g.ki = parse_double(value, key), true;
            }
            if constexpr (requires { g.kd; }) {
                if (field == "kd") return g.kd = parse_double(value, key), true;
            }
            if constexpr (requires { g.lambda; }) {
                if (field == "lambda") return g.lambda = parse_double(value, key), true;
                if (field == "mu") return g.mu = parse_double(value, key), true;
                if (field == "memory") return g.memory = static_cast<std::size_t>(parse_unsigned(value, key)), true;
            }
            return false;
        },
        spec);
    if (!handled) {
        throw ConfigError("not a field of controller type '" + std::string(controller_name(spec)) + "'",
                          std::string(key));
    }
}

void set_reference_field(ReferenceSource& src, std::string_view field, std::string_view key, std::string_view value) {
    bool handled = false;
    if (auto* c = std::get_if<ConstantReference>(&src); c && field == "value") {
        c->r = parse_double(value, key);
        handled = true;
    } else if (auto* s = std::get_if<SineReference>(&src)) {
        if (field == "amp") s->amp = parse_double(value, key), handled = true;
        if (field == "freq") s->freq = parse_double(value, key), handled = true;
        if (field == "offset") s->offset = parse_double(value, key), handled = true;
    } else if (auto* j = std::get_if<JoystickSource>(&src); j && field == "initial_raw") {
        j->initial_raw = parse_int(value, key);
        handled = true;
    }
    if (!handled) throw ConfigError("not a field of the active reference type", std::string(key));
}

void set_disturbance_field(DisturbanceSpec& spec, std::string_view field, std::string_view key,
                           std::string_view value) {
    bool handled = false;
    if (auto* c = std::get_if<ConstantDisturbance>(&spec); c && field == "d0") {
        c->d0 = parse_double(value, key);
        handled = true;
    } else if (auto* s = std::get_if<SineDisturbance>(&spec)) {
        if (field == "amp") s->amp = parse_double(value, key), handled = true;
        if (field == "freq") s->freq = parse_double(value, key), handled = true;
        if (field == "phase") s->phase = parse_double(value, key), handled = true;
    }
    if (!handled) throw ConfigError("not a field of the active disturbance type", std::string(key));
}

bool is_discriminator(std::string_view key) {
    return key == "mode" || key == "controller.type" || key == "reference.type" || key == "disturbance.type";
}

constexpr std::array kNumericKeys{
    "params.m",          "params.ell",       "params.g",         "params.b",
    "controller.tau_max", "controller.deadband", "controller.kp", "controller.ki",
    "controller.kd",     "controller.lambda", "controller.mu",    "controller.memory",
    "controller.derivative_filter_tau", "reference.value", "reference.amp", "reference.freq",
    "reference.offset",  "reference.initial_raw", "reference.filter_tau", "noise.input_std",
    "noise.meas_theta_std", "noise.meas_omega_std", "disturbance.d0", "disturbance.amp",
    "disturbance.freq",  "disturbance.phase", "dt",               "duration",
    "initial.theta",     "initial.omega",    "initial.t",        "limits.tau_min",
    "limits.tau_max",    "seed",             "telemetry.decimation",
};

}  // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text, std::string_view field) {
    text = trim(text);
    const auto pi_at = text.find("pi");
    if (pi_at == std::string_view::npos) return parse_plain_double(text, field);

    // Accepts [-][coef*]pi[/den], e.g. "pi", "-pi/2", "2*pi".
    double sign = 1.0;
    std::string_view head = text.substr(0, pi_at);
    if (!head.empty() && head.front() == '-') {
        sign = -1.0;
        head.remove_prefix(1);
    }
    double coef = 1.0;
    if (!head.empty()) {
        if (head.back() != '*') throw ConfigError("malformed multiple of pi '" + std::string(text) + "'", std::string(field));
        coef = parse_plain_double(head.substr(0, head.size() - 1), field);
    }
    std::string_view tail = text.substr(pi_at + 2);
    double den = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/') throw ConfigError("malformed multiple of pi '" + std::string(text) + "'", std::string(field));
        den = parse_plain_double(tail.substr(1), field);
    }
    return sign * coef * std::numbers::pi / den;
}

std::string_view to_string(Mode mode) { return mode == Mode::OpenLoopTorque ? "open_loop" : "closed_loop"; }
std::string_view to_string(Pacing pacing) { return pacing == Pacing::RealTime ? "realtime" : "fast"; }

bool is_numeric_key(std::string_view key) {
    return std::find(kNumericKeys.begin(), kNumericKeys.end(), key) != kNumericKeys.end();
}

void apply_setting(ScenarioConfig& c, std::string_view key, std::string_view value) {
    value = trim(value);
    const auto dot = key.find('.');
    const std::string_view group = dot == std::string_view::npos ? key : key.substr(0, dot);
    const std::string_view field = dot == std::string_view::npos ? std::string_view{} : key.substr(dot + 1);
    const std::string k(key);

    if (key == "mode") {
        if (value == "closed_loop") c.mode = Mode::ClosedLoopReference;
        else if (value == "open_loop") c.mode = Mode::OpenLoopTorque;
        else throw ConfigError("expected closed_loop or open_loop", k);
    } else if (key == "model") {
        if (value == "nonlinear") c.model = Model::Nonlinear;
        else if (value == "linear") c.model = Model::Linear;
        else throw ConfigError("expected nonlinear or linear", k);
    } else if (group == "params") {
        if (field == "m") c.params.m = parse_double(value, key);
        else if (field == "ell") c.params.ell = parse_double(value, key);
        else if (field == "g") c.params.g = parse_double(value, key);
        else if (field == "b") c.params.b = parse_double(value, key);
        else throw ConfigError("unknown key", k);
    } else if (group == "controller") {
        if (field == "type") c.controller = controller_of_type(value, c.controller);
        else if (field == "derivative_filter_tau") c.controller_options.derivative_filter_tau = parse_double(value, key);
        else if (field == "integrator_clamp") c.controller_options.integrator_clamp = parse_bool(value, key);
        else set_controller_field(c.controller, field, key, value);
    } else if (group == "reference") {
        if (field == "type") {
            if (value == "constant") c.reference = ConstantReference{};
            else if (value == "sine") c.reference = SineReference{};
            else if (value == "joystick") c.reference = JoystickSource{};
            else throw ConfigError("expected constant, sine or joystick", k);
        } else if (field == "filter") {
            c.reference_filter = parse_bool(value, key);
        } else if (field == "filter_tau") {
            c.reference_filter_tau = parse_double(value, key);
        } else {
            set_reference_field(c.reference, field, key, value);
        }
    } else if (group == "noise") {
        if (field == "input_std") c.noise.input_std = parse_double(value, key);
        else if (field == "meas_theta_std") c.noise.meas_theta_std = parse_double(value, key);
        else if (field == "meas_omega_std") c.noise.meas_omega_std = parse_double(value, key);
        else throw ConfigError("unknown key", k);
    } else if (group == "disturbance") {
        if (field == "type") {
            if (value == "none") c.disturbance = NoDisturbance{};
            else if (value == "constant") c.disturbance = ConstantDisturbance{};
            else if (value == "sine") c.disturbance = SineDisturbance{};
            else throw ConfigError("expected none, constant or sine", k);
        } else {
            set_disturbance_field(c.disturbance, field, key, value);
        }
    } else if (key == "integrator") {
        if (value == "rk4") c.integrator = IntegratorKind::RK4;
        else if (value == "euler") c.integrator = IntegratorKind::Euler;
        else throw ConfigError("expected rk4 or euler", k);
    } else if (key == "dt") {
        c.dt = parse_double(value, key);
    } else if (key == "duration") {
        if (value == "none") c.duration.reset();
        else c.duration = parse_double(value, key);
    } else if (group == "initial") {
        if (field == "theta") c.initial.theta = parse_double(value, key);
        else if (field == "omega") c.initial.omega = parse_double(value, key);
        else if (field == "t") c.initial.t = parse_double(value, key);
        else throw ConfigError("unknown key", k);
    } else if (group == "limits") {
        if (field == "tau_min") c.limits.tau_min = parse_double(value, key);
        else if (field == "tau_max") c.limits.tau_max = parse_double(value, key);
        else throw ConfigError("unknown key", k);
    } else if (key == "pacing") {
        if (value == "realtime") c.pacing = Pacing::RealTime;
        else if (value == "fast") c.pacing = Pacing::AsFastAsPossible;
        else throw ConfigError("expected realtime or fast", k);
    } else if (key == "seed") {
        c.seed = parse_unsigned(value, key);
    } else if (key == "telemetry.decimation") {
        c.telemetry_decimation = static_cast<std::size_t>(parse_unsigned(value, key));
    } else {
        throw ConfigError("unknown key", k);
    }
}

void apply_settings(ScenarioConfig& config, const std::vector<Setting>& settings) {
    for (const auto& [key, value] : settings) {
        if (is_discriminator(key)) apply_setting(config, key, value);
    }
    for (const auto& [key, value] : settings) {
        if (!is_discriminator(key)) apply_setting(config, key, value);
    }
}

std::vector<Setting> to_settings(const ScenarioConfig& c) {
    std::vector<Setting> out;
    const auto num = [&](std::string key, double v) { out.emplace_back(std::move(key), format_double(v)); };
    const auto str = [&](std::string key, std::string_view v) { out.emplace_back(std::move(key), std::string(v)); };

    str("mode", to_string(c.mode));
    str("model", c.model == Model::Linear ? "linear" : "nonlinear");
    num("params.m", c.params.m);
    num("params.ell", c.params.ell);
    num("params.g", c.params.g);
    num("params.b", c.params.b);

    str("controller.type", controller_name(c.controller));
    std::visit(
        [&](const auto& g) {
            if constexpr (requires { g.tau_max; }) {
                num("controller.tau_max", g.tau_max);
                num("controller.deadband", g.deadband);
            }
            if constexpr (requires { g.kp; }) num("controller.kp", g.kp);
            if constexpr (requires { g.ki; }) num("controller.ki", g.ki);
            if constexpr (requires { g.kd; }) num("controller.kd", g.kd);
            if constexpr (requires { g.lambda; }) {
                num("controller.lambda", g.lambda);
                num("controller.mu", g.mu);
                str("controller.memory", std::to_string(g.memory));
            }
        },
        c.controller);
    num("controller.derivative_filter_tau", c.controller_options.derivative_filter_tau);
    str("controller.integrator_clamp", c.controller_options.integrator_clamp ? "true" : "false");

    if (const auto* r = std::get_if<ConstantReference>(&c.reference)) {
        str("reference.type", "constant");
        num("reference.value", r->r);
    } else if (const auto* s = std::get_if<SineReference>(&c.reference)) {
        str("reference.type", "sine");
        num("reference.amp", s->amp);
        num("reference.freq", s->freq);
        num("reference.offset", s->offset);
    } else if (const auto* j = std::get_if<JoystickSource>(&c.reference)) {
        str("reference.type", "joystick");
        str("reference.initial_raw", std::to_string(j->initial_raw));
    }
    str("reference.filter", c.reference_filter ? "true" : "false");
    num("reference.filter_tau", c.reference_filter_tau);

    num("noise.input_std", c.noise.input_std);
    num("noise.meas_theta_std", c.noise.meas_theta_std);
    num("noise.meas_omega_std", c.noise.meas_omega_std);

    if (std::holds_alternative<NoDisturbance>(c.disturbance)) {
        str("disturbance.type", "none");
    } else if (const auto* d = std::get_if<ConstantDisturbance>(&c.disturbance)) {
        str("disturbance.type", "constant");
        num("disturbance.d0", d->d0);
    } else if (const auto* s = std::get_if<SineDisturbance>(&c.disturbance)) {
        str("disturbance.type", "sine");
        num("disturbance.amp", s->amp);
        num("disturbance.freq", s->freq);
        num("disturbance.phase", s->phase);
    }

    str("integrator", to_string(c.integrator));
    num("dt", c.dt);
    if (c.duration) num("duration", *c.duration);
    else str("duration", "none");
    num("initial.theta", c.initial.theta);
    num("initial.omega", c.initial.omega);
    num("initial.t", c.initial.t);
    num("limits.tau_min", c.limits.tau_min);
    num("limits.tau_max", c.limits.tau_max);
    str("pacing", to_string(c.pacing));
    str("seed", std::to_string(c.seed));
    str("telemetry.decimation", std::to_string(c.telemetry_decimation));
    return out;
}

void ScenarioConfig::validate() const {
    params.validate();
    pendlab::validate(controller);
    controller_options.validate();
    pendlab::validate(reference);
    if (!(std::isfinite(reference_filter_tau) && reference_filter_tau > 0.0)) {
        throw ConfigError("must be > 0", "reference.filter_tau");
    }
    noise.validate();
    pendlab::validate(disturbance);
    (void)StepSize(dt);
    if (duration && !(std::isfinite(*duration) && *duration > 0.0)) throw ConfigError("must be > 0", "duration");
    if (!std::isfinite(initial.theta) || !std::isfinite(initial.omega) || !std::isfinite(initial.t)) {
        throw ConfigError("initial state must be finite", "initial");
    }
    limits.validate();
}

std::size_t ScenarioConfig::decimation() const {
    if (telemetry_decimation > 0) return telemetry_decimation;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(1.0 / (50.0 * dt) - 1e-9)));
}

NoiseSpec ScenarioConfig::noise_spec() const {
    NoiseSpec spec = noise;
    spec.seed = seed;
    return spec;
}

std::vector<Setting> parse_settings(std::string_view text) {
    std::vector<Setting> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        out.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
    }
    return out;
}

ScenarioConfig parse_scenario(std::string_view text) {
    ScenarioConfig config;
    apply_settings(config, parse_settings(text));
    config.validate();
    return config;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read scenario file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    constexpr std::string_view kConfigPrefix = "#config ";
    if (text.rfind("t,", 0) == 0) {
        std::string extracted;
        std::istringstream lines(text);
        for (std::string line; std::getline(lines, line);) {
            if (line.rfind(kConfigPrefix, 0) == 0) extracted += line.substr(kConfigPrefix.size()) + "\n";
        }
        return parse_scenario(extracted);
    }
    return parse_scenario(text);
}

std::string to_text(const ScenarioConfig& config) {
    std::string out;
    for (const auto& [key, value] : to_settings(config)) out += key + " = " + value + "\n";
    return out;
}

std::uint64_t config_hash(const ScenarioConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : to_text(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace pendlab
