#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "pendlab/protocol.hpp"

namespace pendlab {

/// Bounded per-subscriber event queue.
///
/// Droppable events (telemetry) evict the oldest droppable entry when full;
/// the next pop then yields a Dropped event carrying the number lost.
/// Non-droppable events (state changes, replies) always go in.
class Subscription {
public:
    explicit Subscription(std::size_t capacity);

    void push(ServerEvent event, bool droppable);
    std::optional<ServerEvent> try_pop();
    std::optional<ServerEvent> pop_for(std::chrono::milliseconds timeout);

    /// Called after every push, outside the lock. Must be cheap.
    void set_notify(std::function<void()> notify);

    void close();
    bool closed() const;
    std::uint64_t dropped_total() const;
    std::size_t size() const;

private:
    std::optional<ServerEvent> pop_locked();

    struct Entry {
        ServerEvent event;
        bool droppable;
    };

    mutable std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<Entry> queue_;
    std::size_t capacity_;
    std::uint64_t pending_drops_ = 0;
    std::uint64_t dropped_total_ = 0;
    bool closed_ = false;
    std::function<void()> notify_;
};

class Broadcaster {
public:
    std::shared_ptr<Subscription> subscribe(std::size_t capacity, const std::vector<ServerEvent>& initial = {});
    /// Never blocks on subscribers; closed ones are reaped here.
    void publish(const ServerEvent& event, bool droppable);
    std::size_t subscriber_count() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::shared_ptr<Subscription>> subscribers_;
};

}  // namespace pendlab
