#include "pendlab/broadcast.hpp"

#include <algorithm>

namespace pendlab {

Subscription::Subscription(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

void Subscription::push(ServerEvent event, bool droppable) {
    std::function<void()> notify;
    {
        std::lock_guard lock(mutex_);
        if (closed_) return;
        if (droppable && queue_.size() >= capacity_) {
            auto oldest = std::find_if(queue_.begin(), queue_.end(), [](const Entry& e) { return e.droppable; });
            if (oldest == queue_.end()) {
                // queue is all replies; the new frame is the one to go
                ++pending_drops_;
                ++dropped_total_;
                return;
            }
            queue_.erase(oldest);
            ++pending_drops_;
            ++dropped_total_;
        }
        queue_.push_back({std::move(event), droppable});
        notify = notify_;
    }
    ready_.notify_one();
    if (notify) notify();
}

std::optional<ServerEvent> Subscription::pop_locked() {
    if (pending_drops_ > 0) {
        DroppedEvent dropped{pending_drops_};
        pending_drops_ = 0;
        return ServerEvent{dropped};
    }
    if (queue_.empty()) return std::nullopt;
    ServerEvent event = std::move(queue_.front().event);
    queue_.pop_front();
    return event;
}

std::optional<ServerEvent> Subscription::try_pop() {
    std::lock_guard lock(mutex_);
    return pop_locked();
}

std::optional<ServerEvent> Subscription::pop_for(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    ready_.wait_for(lock, timeout, [this] { return closed_ || pending_drops_ > 0 || !queue_.empty(); });
    return pop_locked();
}

void Subscription::set_notify(std::function<void()> notify) {
    std::lock_guard lock(mutex_);
    notify_ = std::move(notify);
}

void Subscription::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
        notify_ = nullptr;
    }
    ready_.notify_all();
}

bool Subscription::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::uint64_t Subscription::dropped_total() const {
    std::lock_guard lock(mutex_);
    return dropped_total_;
}

std::size_t Subscription::size() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
}

std::shared_ptr<Subscription> Broadcaster::subscribe(std::size_t capacity, const std::vector<ServerEvent>& initial) {
    auto sub = std::make_shared<Subscription>(capacity);
    for (const auto& event : initial) sub->push(event, false);
    std::lock_guard lock(mutex_);
    subscribers_.push_back(sub);
    return sub;
}

void Broadcaster::publish(const ServerEvent& event, bool droppable) {
    std::vector<std::shared_ptr<Subscription>> targets;
    {
        std::lock_guard lock(mutex_);
        std::erase_if(subscribers_, [](const auto& s) { return s->closed(); });
        targets = subscribers_;
    }
    for (auto& sub : targets) sub->push(event, droppable);
}

std::size_t Broadcaster::subscriber_count() const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(
        std::count_if(subscribers_.begin(), subscribers_.end(), [](const auto& s) { return !s->closed(); }));
}

}  // namespace pendlab
