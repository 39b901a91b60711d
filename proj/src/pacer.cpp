#include "pendlab/pacer.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace pendlab {

double SteadyClock::now() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void SteadyClock::sleep_until(double deadline) {
    using namespace std::chrono;
    const auto target = steady_clock::time_point(duration_cast<steady_clock::duration>(duration<double>(deadline)));
    std::this_thread::sleep_until(target);
}

Pacer::Pacer(Clock& clock, double dt, double max_lag) : clock_(clock), dt_(dt), max_lag_(max_lag) {}

Pacer::Slot Pacer::wait_next() {
    if (!started_) {
        start_ = clock_.now();
        started_ = true;
    }
    const double deadline = start_ + static_cast<double>(next_) * dt_;
    Slot slot{next_, 0.0, false};
    const double now = clock_.now();
    if (now < deadline) {
        clock_.sleep_until(deadline);
    } else {
        slot.lag = now - deadline;
        // Released more than a full period late: this tick is catching up.
        slot.catch_up = slot.lag >= dt_;
        if (slot.catch_up) ++catch_up_ticks_;
        worst_lag_ = std::max(worst_lag_, slot.lag);
        if (slot.lag > max_lag_) overrun_ = true;
    }
    ++next_;
    return slot;
}

}  // namespace pendlab
