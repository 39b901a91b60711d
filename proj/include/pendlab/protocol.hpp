#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "pendlab/controllers.hpp"
#include "pendlab/runner.hpp"
#include "pendlab/session.hpp"

namespace pendlab {

inline constexpr int kProtocolVersion = 1;

// Client → server.
struct StartSession {
    /// Flat `key: value` overlay on the server's base scenario, keys as in
    /// scenario files. Values are numbers, strings, booleans or null.
    nlohmann::json config = nlohmann::json::object();
};
struct StopSession {};
struct AdcFrame {
    int raw = 0;
};
struct SetReference {
    double r = 0.0;
};
struct SetController {
    ControllerSpec spec;
};
struct SetFriction {
    double b = 0.0;
};
struct Ping {
    std::uint64_t nonce = 0;
};

using CommandMessage = std::variant<StartSession, StopSession, AdcFrame, SetReference, SetController, SetFriction, Ping>;

// Server → client.
struct TelemetryEvent {
    TelemetryFrame frame;
};
struct SessionStateEvent {
    RunState state = RunState::Stopped;
};
struct ErrorEvent {
    std::string code;
    std::string message;
    std::string field;
};
struct PongEvent {
    std::uint64_t nonce = 0;
};
struct AckEvent {
    std::string command;
};
struct DroppedEvent {
    std::uint64_t count = 0;
};

using ServerEvent = std::variant<TelemetryEvent, SessionStateEvent, ErrorEvent, PongEvent, AckEvent, DroppedEvent>;

namespace error_code {
inline constexpr std::string_view bad_request = "bad-request";
inline constexpr std::string_view unsupported_version = "unsupported-version";
inline constexpr std::string_view already_running = "already-running";
inline constexpr std::string_view not_running = "not-running";
inline constexpr std::string_view wrong_mode = "wrong-mode";
}  // namespace error_code

/// A message that could not be decoded. Converts to an ErrorEvent reply.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(std::string_view code, const std::string& message, std::string field = {})
        : std::runtime_error(message), code_(code), field_(std::move(field)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }
    ErrorEvent to_event() const { return {code_, what(), field_}; }

private:
    std::string code_;
    std::string field_;
};

std::string_view message_type(const CommandMessage& message);
std::string_view message_type(const ServerEvent& event);

/// Compact JSON, keys sorted, no trailing newline.
std::string encode(const CommandMessage& message);
std::string encode(const ServerEvent& event);

/// Throws ProtocolError (bad-request or unsupported-version).
CommandMessage decode_command(std::string_view text);
ServerEvent decode_event(std::string_view text);

nlohmann::json controller_to_json(const ControllerSpec& spec);
ControllerSpec controller_from_json(const nlohmann::json& doc, const std::string& path = "controller");

/// Scenario settings carried by a StartSession overlay.
std::vector<Setting> overlay_settings(const nlohmann::json& config);

}  // namespace pendlab

namespace pendlab {

// Input logs: one JSON document per line, the command message plus "tick".
CommandMessage to_message(const SessionCommand& command);
/// Throws ProtocolError for messages that are not session inputs.
SessionCommand to_session_command(const CommandMessage& message);

std::string encode_input(const LoggedInput& input);
LoggedInput decode_input(std::string_view line);
void write_input_log(std::ostream& out, const InputLog& log);
/// Blank lines and lines starting with '#' are skipped.
InputLog read_input_log(std::istream& in);

}  // namespace pendlab
