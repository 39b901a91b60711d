#include "pendlab/runner.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pendlab/errors.hpp"

namespace pendlab {

std::string_view to_string(RunState state) {
    switch (state) {
        case RunState::Running: return "running";
        case RunState::Stopped: return "stopped";
        case RunState::Diverged: return "diverged";
        case RunState::Aborted: return "aborted";
    }
    return "stopped";
}

SessionRunner::SessionRunner(ScenarioConfig config, Clock& clock, RunnerHooks hooks, std::size_t record_limit)
    : config_(std::move(config)), clock_(clock), hooks_(std::move(hooks)), record_limit_(record_limit) {
    config_.validate();
    record_.config = config_;
}

SessionRunner::~SessionRunner() {
    request_stop();
    join();
}

void SessionRunner::start() {
    state_ = RunState::Running;
    thread_ = std::thread([this] { loop(); });
}

void SessionRunner::submit(SessionCommand command) {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(std::move(command));
}

void SessionRunner::request_stop() { stop_requested_ = true; }

void SessionRunner::join() {
    if (thread_.joinable()) thread_.join();
}

SessionRecord SessionRunner::record() const {
    std::lock_guard lock(record_mutex_);
    return record_;
}

InputLog SessionRunner::input_log() const {
    std::lock_guard lock(record_mutex_);
    return inputs_;
}

std::uint64_t SessionRunner::unrecorded_frames() const {
    std::lock_guard lock(record_mutex_);
    return unrecorded_;
}

void SessionRunner::loop() {
    Session session(config_);
    Pacer pacer(clock_, config_.dt);
    const bool realtime = config_.pacing == Pacing::RealTime;
    const std::uint64_t steps = config_.duration
                                    ? static_cast<std::uint64_t>(std::llround(*config_.duration / config_.dt))
                                    : std::numeric_limits<std::uint64_t>::max();
    const std::size_t decimation = config_.decimation();

    Outcome outcome = Outcome::Completed;
    std::string diagnostic;
    std::deque<SessionCommand> pending;

    while (!stop_requested_ && session.tick_index() < steps) {
        if (realtime) {
            const auto slot = pacer.wait_next();
            if (pacer.overrun()) {
                outcome = Outcome::Aborted;
                std::ostringstream msg;
                msg << "real-time lag of " << slot.lag << " s exceeded " << pacer.max_lag() << " s";
                diagnostic = msg.str();
                break;
            }
        }
        {
            std::lock_guard lock(queue_mutex_);
            pending.swap(queue_);
        }
        const std::uint64_t n = session.tick_index();
        for (auto& command : pending) {
            try {
                session.apply(command);
            } catch (const ConfigError&) {
                continue;  // validated upstream; a stale command is simply not applied
            }
            std::lock_guard lock(record_mutex_);
            inputs_.push_back({n, std::move(command)});
        }
        pending.clear();

        auto result = session.tick();
        {
            std::lock_guard lock(record_mutex_);
            if (record_.frames.size() < record_limit_) record_.frames.push_back(result.frame);
            else ++unrecorded_;
        }
        if (n % decimation == 0 && hooks_.on_telemetry) hooks_.on_telemetry(result.frame);
        ticks_ = session.tick_index();
        if (result.diverged) {
            outcome = Outcome::Diverged;
            diagnostic = result.diagnostic;
            break;
        }
    }

    {
        std::lock_guard lock(record_mutex_);
        if (outcome == Outcome::Completed) {
            if (record_.frames.size() < record_limit_) record_.frames.push_back(session.observe());
            else ++unrecorded_;
            record_.config.duration = static_cast<double>(session.tick_index()) * config_.dt;
            if (record_.config.duration == 0.0) record_.config.duration.reset();
            if (unrecorded_ == 0) record_.metrics = record_metrics(record_);
        }
        record_.outcome = outcome;
        record_.diagnostic = diagnostic;
        record_.final_integral = session.controller().integral_term();
    }

    const RunState final_state = outcome == Outcome::Completed  ? RunState::Stopped
                                 : outcome == Outcome::Diverged ? RunState::Diverged
                                                                : RunState::Aborted;
    state_ = final_state;
    finished_ = true;
    if (hooks_.on_finish) hooks_.on_finish(final_state);
}

}  // namespace pendlab
