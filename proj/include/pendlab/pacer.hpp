#pragma once

#include <cstdint>

namespace pendlab {

/// Monotonic time source in seconds. Abstract so tests can drive the pacer
/// with a fake clock.
class Clock {
public:
    virtual ~Clock() = default;
    virtual double now() = 0;
    virtual void sleep_until(double deadline) = 0;
};

class SteadyClock final : public Clock {
public:
    double now() override;
    void sleep_until(double deadline) override;
};

/// Schedules fixed-rate ticks against wall time.
///
/// Tick n is due at start + n·dt, so rounding never accumulates into drift.
/// When the host falls behind, due ticks are released immediately (catch-up)
/// until the schedule is met again; ticks are never skipped.
class Pacer {
public:
    struct Slot {
        std::uint64_t tick = 0;
        double lag = 0.0;     ///< how late the tick was released [s]
        bool catch_up = false;
    };

    Pacer(Clock& clock, double dt, double max_lag = 0.5);

    /// Blocks until the next tick is due.
    Slot wait_next();

    /// True once a released tick lagged by more than max_lag.
    bool overrun() const noexcept { return overrun_; }
    double max_lag() const noexcept { return max_lag_; }
    double worst_lag() const noexcept { return worst_lag_; }
    std::uint64_t catch_up_ticks() const noexcept { return catch_up_ticks_; }

private:
    Clock& clock_;
    double dt_;
    double max_lag_;
    double start_ = 0.0;
    bool started_ = false;
    std::uint64_t next_ = 0;
    bool overrun_ = false;
    double worst_lag_ = 0.0;
    std::uint64_t catch_up_ticks_ = 0;
};

}  // namespace pendlab
