#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "pendlab/broadcast.hpp"
#include "pendlab/pacer.hpp"
#include "pendlab/protocol.hpp"
#include "pendlab/runner.hpp"

namespace pendlab {

struct ServerOptions {
    /// Scenario that StartSession overlays are applied to.
    ScenarioConfig base;
    std::size_t subscriber_capacity = 256;
    /// When set, each finished session writes session-NNN/{session.csv,inputs.jsonl} here.
    std::optional<std::filesystem::path> record_dir;
    /// Pacing clock; a SteadyClock when null.
    Clock* clock = nullptr;
    std::size_t record_limit = 600000;
};

/// Transport-independent server model: one session at a time, commands in,
/// events out. Every command gets exactly one reply.
class ControlServer {
public:
    explicit ControlServer(ServerOptions options);
    ~ControlServer();

    ControlServer(const ControlServer&) = delete;
    ControlServer& operator=(const ControlServer&) = delete;

    ServerEvent handle(const CommandMessage& message);
    /// Decode, handle, encode. Malformed input yields an error reply.
    std::string handle_line(std::string_view line);

    /// The first event on a new subscription is the current SessionState.
    std::shared_ptr<Subscription> subscribe();

    RunState state() const;
    /// Blocks until the current session (if any) has finished.
    void wait_finished();
    /// Stops any running session and waits for it.
    void shutdown();

    std::optional<SessionRecord> last_record() const;
    std::optional<InputLog> last_inputs() const;
    std::optional<std::filesystem::path> last_record_path() const;
    std::size_t subscriber_count() const { return broadcaster_.subscriber_count(); }

private:
    ServerEvent start(const StartSession& message);
    ServerEvent forward(const CommandMessage& message);
    void finished(RunState state);

    ServerOptions options_;
    SteadyClock steady_;
    Broadcaster broadcaster_;

    mutable std::mutex mutex_;
    std::unique_ptr<SessionRunner> runner_;
    ScenarioConfig active_;
    RunState state_ = RunState::Stopped;
    std::size_t sessions_ = 0;
    std::optional<std::filesystem::path> last_path_;
};

}  // namespace pendlab
