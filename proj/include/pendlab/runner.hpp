#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <string_view>
#include <thread>

#include "pendlab/pacer.hpp"
#include "pendlab/session.hpp"

namespace pendlab {

enum class RunState { Running, Stopped, Diverged, Aborted };
std::string_view to_string(RunState state);

struct RunnerHooks {
    /// Every decimated frame, called on the simulation thread. Must not block.
    std::function<void(const TelemetryFrame&)> on_telemetry;
    /// Called once when the loop exits with the final state.
    std::function<void(RunState)> on_finish;
};

/// Owns a live session on its own thread.
///
/// Commands are queued from any thread and drained once per tick, in order;
/// each applied command is logged with its tick so the run can be replayed
/// headless. In realtime pacing the loop follows a Pacer and aborts if it
/// falls more than 0.5 s behind.
class SessionRunner {
public:
    SessionRunner(ScenarioConfig config, Clock& clock, RunnerHooks hooks, std::size_t record_limit = 600000);
    ~SessionRunner();

    SessionRunner(const SessionRunner&) = delete;
    SessionRunner& operator=(const SessionRunner&) = delete;

    void start();
    void submit(SessionCommand command);
    void request_stop();
    void join();

    RunState state() const noexcept { return state_.load(); }
    bool finished() const noexcept { return finished_.load(); }
    std::uint64_t ticks() const noexcept { return ticks_.load(); }

    /// Frames recorded so far (capped at record_limit) and outcome.
    SessionRecord record() const;
    InputLog input_log() const;
    /// Frames that did not fit under record_limit.
    std::uint64_t unrecorded_frames() const;

private:
    void loop();

    ScenarioConfig config_;
    Clock& clock_;
    RunnerHooks hooks_;
    std::size_t record_limit_;

    mutable std::mutex queue_mutex_;
    std::deque<SessionCommand> queue_;

    mutable std::mutex record_mutex_;
    SessionRecord record_;
    InputLog inputs_;
    std::uint64_t unrecorded_ = 0;

    std::atomic<RunState> state_{RunState::Running};
    std::atomic<bool> stop_requested_{false};
    std::atomic<bool> finished_{false};
    std::atomic<std::uint64_t> ticks_{0};
    std::thread thread_;
};

}  // namespace pendlab
