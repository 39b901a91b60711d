#include "pendlab/protocol.hpp"

#include <cmath>
#include <initializer_list>
#include <istream>
#include <ostream>

#include "pendlab/errors.hpp"

namespace pendlab {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad(const std::string& message, const std::string& field) {
    throw ProtocolError(error_code::bad_request, message, field);
}

std::string join(const std::string& prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

json parse_document(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error&) {
        bad("malformed JSON", "");
    }
    if (!doc.is_object()) bad("message must be a JSON object", "");
    auto v = doc.find("v");
    if (v == doc.end()) bad("missing protocol version", "v");
    if (!v->is_number_integer()) bad("protocol version must be an integer", "v");
    if (v->get<std::int64_t>() != kProtocolVersion)
        throw ProtocolError(error_code::unsupported_version,
                            "unsupported protocol version " + v->dump() + " (expected 1)", "v");
    auto type = doc.find("type");
    if (type == doc.end()) bad("missing message type", "type");
    if (!type->is_string()) bad("message type must be a string", "type");
    return doc;
}

void allow_only(const json& doc, std::initializer_list<std::string_view> allowed, const std::string& prefix = {}) {
    for (const auto& item : doc.items()) {
        bool known = false;
        for (auto name : allowed) known = known || item.key() == name;
        if (!known) bad("unknown field", join(prefix, item.key()));
    }
}

const json& require(const json& doc, std::string_view key, const std::string& prefix = {}) {
    auto it = doc.find(key);
    if (it == doc.end()) bad("missing field", join(prefix, key));
    return *it;
}

double number_at(const json& doc, std::string_view key, const std::string& prefix = {}) {
    const json& value = require(doc, key, prefix);
    if (!value.is_number()) bad("expected a number", join(prefix, key));
    return value.get<double>();
}

double optional_number(const json& doc, std::string_view key, double fallback, const std::string& prefix) {
    return doc.contains(key) ? number_at(doc, key, prefix) : fallback;
}

std::uint64_t unsigned_at(const json& doc, std::string_view key, const std::string& prefix = {}) {
    const json& value = require(doc, key, prefix);
    if (!value.is_number_unsigned()) bad("expected a non-negative integer", join(prefix, key));
    return value.get<std::uint64_t>();
}

std::string string_at(const json& doc, std::string_view key, const std::string& prefix = {}) {
    const json& value = require(doc, key, prefix);
    if (!value.is_string()) bad("expected a string", join(prefix, key));
    return value.get<std::string>();
}

json envelope(std::string_view type) {
    json doc = json::object();
    doc["type"] = type;
    doc["v"] = kProtocolVersion;
    return doc;
}

json frame_to_json(const TelemetryFrame& f) {
    json doc = json::object();
    doc["t"] = f.t;
    doc["theta"] = f.theta;
    doc["omega"] = f.omega;
    doc["r"] = f.r;
    doc["tau_cmd"] = f.tau_cmd;
    doc["tau_sat"] = f.tau_sat;
    doc["disturbance"] = f.disturbance;
    doc["energy"] = f.energy;
    doc["aug_energy"] = f.aug_energy ? json(*f.aug_energy) : json(nullptr);
    doc["theta_meas"] = f.theta_meas;
    doc["omega_meas"] = f.omega_meas;
    return doc;
}

TelemetryFrame frame_from_json(const json& doc) {
    const std::string p = "frame";
    if (!doc.is_object()) bad("expected an object", p);
    allow_only(doc, {"t", "theta", "omega", "r", "tau_cmd", "tau_sat", "disturbance", "energy", "aug_energy",
                     "theta_meas", "omega_meas"},
               p);
    TelemetryFrame f;
    f.t = number_at(doc, "t", p);
    f.theta = number_at(doc, "theta", p);
    f.omega = number_at(doc, "omega", p);
    f.r = number_at(doc, "r", p);
    f.tau_cmd = number_at(doc, "tau_cmd", p);
    f.tau_sat = number_at(doc, "tau_sat", p);
    f.disturbance = number_at(doc, "disturbance", p);
    f.energy = number_at(doc, "energy", p);
    const json& aug = require(doc, "aug_energy", p);
    if (aug.is_null()) f.aug_energy.reset();
    else if (aug.is_number()) f.aug_energy = aug.get<double>();
    else bad("expected a number or null", "frame.aug_energy");
    f.theta_meas = number_at(doc, "theta_meas", p);
    f.omega_meas = number_at(doc, "omega_meas", p);
    return f;
}

std::optional<RunState> parse_run_state(std::string_view text) {
    for (auto s : {RunState::Running, RunState::Stopped, RunState::Diverged, RunState::Aborted})
        if (to_string(s) == text) return s;
    return std::nullopt;
}

}  // namespace

std::string_view message_type(const CommandMessage& message) {
    return std::visit(overloaded{
                          [](const StartSession&) { return std::string_view("start_session"); },
                          [](const StopSession&) { return std::string_view("stop_session"); },
                          [](const AdcFrame&) { return std::string_view("adc_frame"); },
                          [](const SetReference&) { return std::string_view("set_reference"); },
                          [](const SetController&) { return std::string_view("set_controller"); },
                          [](const SetFriction&) { return std::string_view("set_friction"); },
                          [](const Ping&) { return std::string_view("ping"); },
                      },
                      message);
}

std::string_view message_type(const ServerEvent& event) {
    return std::visit(overloaded{
                          [](const TelemetryEvent&) { return std::string_view("telemetry"); },
                          [](const SessionStateEvent&) { return std::string_view("session_state"); },
                          [](const ErrorEvent&) { return std::string_view("error"); },
                          [](const PongEvent&) { return std::string_view("pong"); },
                          [](const AckEvent&) { return std::string_view("ack"); },
                          [](const DroppedEvent&) { return std::string_view("dropped"); },
                      },
                      event);
}

json controller_to_json(const ControllerSpec& spec) {
    json doc = json::object();
    doc["type"] = controller_name(spec);
    std::visit(overloaded{
                   [&](const BangBangGains& g) {
                       doc["tau_max"] = g.tau_max;
                       doc["deadband"] = g.deadband;
                   },
                   [&](const PGains& g) { doc["kp"] = g.kp; },
                   [&](const PDGains& g) {
                       doc["kp"] = g.kp;
                       doc["kd"] = g.kd;
                   },
                   [&](const PIDGains& g) {
                       doc["kp"] = g.kp;
                       doc["ki"] = g.ki;
                       doc["kd"] = g.kd;
                   },
                   [&](const FPIDGains& g) {
                       doc["kp"] = g.kp;
                       doc["ki"] = g.ki;
                       doc["kd"] = g.kd;
                       doc["lambda"] = g.lambda;
                       doc["mu"] = g.mu;
                       doc["memory"] = g.memory;
                   },
               },
               spec);
    return doc;
}

ControllerSpec controller_from_json(const json& doc, const std::string& path) {
    if (!doc.is_object()) bad("expected an object", path);
    const std::string type = string_at(doc, "type", path);
    ControllerSpec spec;
    if (type == "bang_bang") {
        allow_only(doc, {"type", "tau_max", "deadband"}, path);
        BangBangGains g;
        g.tau_max = optional_number(doc, "tau_max", g.tau_max, path);
        g.deadband = optional_number(doc, "deadband", g.deadband, path);
        spec = g;
    } else if (type == "p") {
        allow_only(doc, {"type", "kp"}, path);
        PGains g;
        g.kp = optional_number(doc, "kp", g.kp, path);
        spec = g;
    } else if (type == "pd") {
        allow_only(doc, {"type", "kp", "kd"}, path);
        PDGains g;
        g.kp = optional_number(doc, "kp", g.kp, path);
        g.kd = optional_number(doc, "kd", g.kd, path);
        spec = g;
    } else if (type == "pid") {
        allow_only(doc, {"type", "kp", "ki", "kd"}, path);
        PIDGains g;
        g.kp = optional_number(doc, "kp", g.kp, path);
        g.ki = optional_number(doc, "ki", g.ki, path);
        g.kd = optional_number(doc, "kd", g.kd, path);
        spec = g;
    } else if (type == "fpid") {
        allow_only(doc, {"type", "kp", "ki", "kd", "lambda", "mu", "memory"}, path);
        FPIDGains g;
        g.kp = optional_number(doc, "kp", g.kp, path);
        g.ki = optional_number(doc, "ki", g.ki, path);
        g.kd = optional_number(doc, "kd", g.kd, path);
        g.lambda = optional_number(doc, "lambda", g.lambda, path);
        g.mu = optional_number(doc, "mu", g.mu, path);
        if (doc.contains("memory")) g.memory = unsigned_at(doc, "memory", path);
        spec = g;
    } else {
        bad("unknown controller type '" + type + "'", path + ".type");
    }
    try {
        validate(spec);
    } catch (const ConfigError& e) {
        bad(e.what(), e.field().empty() ? path : e.field());
    }
    return spec;
}

std::vector<Setting> overlay_settings(const json& config) {
    if (!config.is_object()) bad("expected an object", "config");
    std::vector<Setting> settings;
    for (const auto& item : config.items()) {
        const json& value = item.value();
        std::string text;
        if (value.is_string()) text = value.get<std::string>();
        else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
        else if (value.is_null()) text = "none";
        else if (value.is_number()) text = value.dump();
        else bad("expected a scalar value", "config." + item.key());
        settings.emplace_back(item.key(), std::move(text));
    }
    return settings;
}

std::string encode(const CommandMessage& message) {
    json doc = envelope(message_type(message));
    std::visit(overloaded{
                   [&](const StartSession& m) { doc["config"] = m.config; },
                   [](const StopSession&) {},
                   [&](const AdcFrame& m) { doc["raw"] = m.raw; },
                   [&](const SetReference& m) { doc["r"] = m.r; },
                   [&](const SetController& m) { doc["controller"] = controller_to_json(m.spec); },
                   [&](const SetFriction& m) { doc["b"] = m.b; },
                   [&](const Ping& m) { doc["nonce"] = m.nonce; },
               },
               message);
    return doc.dump();
}

std::string encode(const ServerEvent& event) {
    json doc = envelope(message_type(event));
    std::visit(overloaded{
                   [&](const TelemetryEvent& e) { doc["frame"] = frame_to_json(e.frame); },
                   [&](const SessionStateEvent& e) { doc["state"] = to_string(e.state); },
                   [&](const ErrorEvent& e) {
                       doc["code"] = e.code;
                       doc["message"] = e.message;
                       if (!e.field.empty()) doc["field"] = e.field;
                   },
                   [&](const PongEvent& e) { doc["nonce"] = e.nonce; },
                   [&](const AckEvent& e) { doc["command"] = e.command; },
                   [&](const DroppedEvent& e) { doc["count"] = e.count; },
               },
               event);
    return doc.dump();
}

CommandMessage decode_command(std::string_view text) {
    const json doc = parse_document(text);
    const std::string type = doc["type"].get<std::string>();
    if (type == "start_session") {
        allow_only(doc, {"type", "v", "config"});
        StartSession m;
        if (doc.contains("config")) {
            m.config = doc["config"];
            overlay_settings(m.config);  // shape check only; semantics need the base config
        }
        return m;
    }
    if (type == "stop_session") {
        allow_only(doc, {"type", "v"});
        return StopSession{};
    }
    if (type == "adc_frame") {
        allow_only(doc, {"type", "v", "raw"});
        const json& raw = require(doc, "raw");
        if (!raw.is_number_integer()) bad("expected an integer", "raw");
        const auto value = raw.get<std::int64_t>();
        if (value < 0 || value > 1023) bad("raw out of range 0..1023", "raw");
        return AdcFrame{static_cast<int>(value)};
    }
    if (type == "set_reference") {
        allow_only(doc, {"type", "v", "r"});
        return SetReference{number_at(doc, "r")};
    }
    if (type == "set_controller") {
        allow_only(doc, {"type", "v", "controller"});
        return SetController{controller_from_json(require(doc, "controller"))};
    }
    if (type == "set_friction") {
        allow_only(doc, {"type", "v", "b"});
        const double b = number_at(doc, "b");
        if (!(b >= 0.0)) bad("friction must be >= 0", "b");
        return SetFriction{b};
    }
    if (type == "ping") {
        allow_only(doc, {"type", "v", "nonce"});
        return Ping{unsigned_at(doc, "nonce")};
    }
    bad("unknown message type '" + type + "'", "type");
}

ServerEvent decode_event(std::string_view text) {
    const json doc = parse_document(text);
    const std::string type = doc["type"].get<std::string>();
    if (type == "telemetry") {
        allow_only(doc, {"type", "v", "frame"});
        return TelemetryEvent{frame_from_json(require(doc, "frame"))};
    }
    if (type == "session_state") {
        allow_only(doc, {"type", "v", "state"});
        auto state = parse_run_state(string_at(doc, "state"));
        if (!state) bad("unknown session state", "state");
        return SessionStateEvent{*state};
    }
    if (type == "error") {
        allow_only(doc, {"type", "v", "code", "message", "field"});
        ErrorEvent e{string_at(doc, "code"), string_at(doc, "message"), {}};
        if (doc.contains("field")) e.field = string_at(doc, "field");
        return e;
    }
    if (type == "pong") {
        allow_only(doc, {"type", "v", "nonce"});
        return PongEvent{unsigned_at(doc, "nonce")};
    }
    if (type == "ack") {
        allow_only(doc, {"type", "v", "command"});
        return AckEvent{string_at(doc, "command")};
    }
    if (type == "dropped") {
        allow_only(doc, {"type", "v", "count"});
        return DroppedEvent{unsigned_at(doc, "count")};
    }
    bad("unknown event type '" + type + "'", "type");
}

}  // namespace pendlab

namespace pendlab {

CommandMessage to_message(const SessionCommand& command) {
    return std::visit(overloaded{
                          [](const AdcInput& c) -> CommandMessage { return AdcFrame{c.raw}; },
                          [](const ReferenceInput& c) -> CommandMessage { return SetReference{c.r}; },
                          [](const ControllerInput& c) -> CommandMessage { return SetController{c.spec}; },
                          [](const FrictionInput& c) -> CommandMessage { return SetFriction{c.b}; },
                      },
                      command);
}

SessionCommand to_session_command(const CommandMessage& message) {
    if (auto* m = std::get_if<AdcFrame>(&message)) return AdcInput{m->raw};
    if (auto* m = std::get_if<SetReference>(&message)) return ReferenceInput{m->r};
    if (auto* m = std::get_if<SetController>(&message)) return ControllerInput{m->spec};
    if (auto* m = std::get_if<SetFriction>(&message)) return FrictionInput{m->b};
    throw ProtocolError(error_code::bad_request,
                        "'" + std::string(message_type(message)) + "' is not a session input", "type");
}

std::string encode_input(const LoggedInput& input) {
    json doc = json::parse(encode(to_message(input.command)));
    doc["tick"] = input.tick;
    return doc.dump();
}

LoggedInput decode_input(std::string_view line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::parse_error&) {
        bad("malformed JSON", "");
    }
    if (!doc.is_object()) bad("input must be a JSON object", "");
    LoggedInput input;
    input.tick = unsigned_at(doc, "tick");
    doc.erase("tick");
    input.command = to_session_command(decode_command(doc.dump()));
    return input;
}

void write_input_log(std::ostream& out, const InputLog& log) {
    for (const auto& input : log) out << encode_input(input) << '\n';
}

InputLog read_input_log(std::istream& in) {
    InputLog log;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line.front() == '#') continue;
        try {
            log.push_back(decode_input(line));
        } catch (const ProtocolError& e) {
            throw ProtocolError(e.code(), "line " + std::to_string(number) + ": " + e.what(), e.field());
        }
        if (log.size() > 1 && log.back().tick < log[log.size() - 2].tick)
            throw ProtocolError(error_code::bad_request, "line " + std::to_string(number) + ": ticks out of order",
                                "tick");
    }
    return log;
}

}  // namespace pendlab
