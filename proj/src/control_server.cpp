#include "pendlab/control_server.hpp"

#include <cstdio>
#include <fstream>

#include "pendlab/csv.hpp"
#include "pendlab/errors.hpp"

namespace pendlab {

namespace {

ErrorEvent error(std::string_view code, const std::string& message, std::string field = {}) {
    return {std::string(code), message, std::move(field)};
}

}  // namespace

ControlServer::ControlServer(ServerOptions options) : options_(std::move(options)) {
    options_.base.validate();
    if (!options_.clock) options_.clock = &steady_;
    active_ = options_.base;
}

ControlServer::~ControlServer() { shutdown(); }

std::string ControlServer::handle_line(std::string_view line) {
    try {
        return encode(handle(decode_command(line)));
    } catch (const ProtocolError& e) {
        return encode(ServerEvent{e.to_event()});
    }
}

ServerEvent ControlServer::handle(const CommandMessage& message) {
    if (auto* ping = std::get_if<Ping>(&message)) return PongEvent{ping->nonce};
    if (auto* start_message = std::get_if<StartSession>(&message)) return start(*start_message);
    return forward(message);
}

ServerEvent ControlServer::start(const StartSession& message) {
    ScenarioConfig config = options_.base;
    try {
        apply_settings(config, overlay_settings(message.config));
        config.validate();
    } catch (const ProtocolError& e) {
        return e.to_event();
    } catch (const ConfigError& e) {
        return error(error_code::bad_request, e.what(), e.field().empty() ? "config" : "config." + e.field());
    }

    std::lock_guard lock(mutex_);
    if (state_ == RunState::Running) return error(error_code::already_running, "a session is already running");
    if (runner_) runner_->join();

    RunnerHooks hooks;
    hooks.on_telemetry = [this](const TelemetryFrame& frame) { broadcaster_.publish(TelemetryEvent{frame}, true); };
    hooks.on_finish = [this](RunState state) { finished(state); };
    runner_ = std::make_unique<SessionRunner>(config, *options_.clock, std::move(hooks), options_.record_limit);
    active_ = config;
    state_ = RunState::Running;
    ++sessions_;
    broadcaster_.publish(SessionStateEvent{RunState::Running}, false);
    runner_->start();
    return AckEvent{"start_session"};
}

ServerEvent ControlServer::forward(const CommandMessage& message) {
    const std::string type(message_type(message));
    std::lock_guard lock(mutex_);
    if (state_ != RunState::Running || !runner_) return error(error_code::not_running, "no session is running");

    if (std::holds_alternative<StopSession>(message)) {
        runner_->request_stop();
        return AckEvent{type};
    }
    const bool closed_loop = active_.mode == Mode::ClosedLoopReference;
    if (std::holds_alternative<AdcFrame>(message) && !std::holds_alternative<JoystickSource>(active_.reference))
        return error(error_code::wrong_mode, "ADC frames need a joystick-sourced session", "raw");
    if (std::holds_alternative<SetReference>(message)) {
        if (!closed_loop) return error(error_code::wrong_mode, "open-loop sessions have no reference", "r");
        active_.reference = ConstantReference{std::get<SetReference>(message).r};
    }
    if (std::holds_alternative<SetController>(message) && !closed_loop)
        return error(error_code::wrong_mode, "open-loop sessions have no controller", "controller");

    runner_->submit(to_session_command(message));
    return AckEvent{type};
}

void ControlServer::finished(RunState state) {
    // Runs on the session thread. Files first, so the mutex is not held for I/O.
    std::optional<std::filesystem::path> path;
    if (options_.record_dir && runner_) {
        std::size_t index;
        {
            std::lock_guard lock(mutex_);
            index = sessions_;
        }
        char name[32];
        std::snprintf(name, sizeof name, "session-%03zu", index);
        path = *options_.record_dir / name;
        std::error_code ec;
        std::filesystem::create_directories(*path, ec);
        std::ofstream csv(*path / "session.csv");
        write_csv(csv, runner_->record());
        std::ofstream inputs(*path / "inputs.jsonl");
        write_input_log(inputs, runner_->input_log());
        if (ec || !csv || !inputs) std::fprintf(stderr, "pendlab: could not write session record to %s\n", path->c_str());
    }
    std::lock_guard lock(mutex_);
    state_ = state;
    if (path) last_path_ = path;
    broadcaster_.publish(SessionStateEvent{state}, false);
}

std::shared_ptr<Subscription> ControlServer::subscribe() {
    std::lock_guard lock(mutex_);
    return broadcaster_.subscribe(options_.subscriber_capacity, {SessionStateEvent{state_}});
}

RunState ControlServer::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

void ControlServer::wait_finished() {
    SessionRunner* runner;
    {
        std::lock_guard lock(mutex_);
        runner = runner_.get();
    }
    if (runner) runner->join();
}

void ControlServer::shutdown() {
    SessionRunner* runner;
    {
        std::lock_guard lock(mutex_);
        runner = runner_.get();
    }
    if (runner) {
        runner->request_stop();
        runner->join();
    }
}

std::optional<SessionRecord> ControlServer::last_record() const {
    std::lock_guard lock(mutex_);
    if (!runner_ || state_ == RunState::Running) return std::nullopt;
    return runner_->record();
}

std::optional<InputLog> ControlServer::last_inputs() const {
    std::lock_guard lock(mutex_);
    if (!runner_ || state_ == RunState::Running) return std::nullopt;
    return runner_->input_log();
}

std::optional<std::filesystem::path> ControlServer::last_record_path() const {
    std::lock_guard lock(mutex_);
    return last_path_;
}

}  // namespace pendlab
