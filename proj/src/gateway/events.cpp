#include "drip/gateway/events.hpp"

#include <algorithm>

#include "drip/core/types.hpp"

namespace drip::gateway {

EventHub::EventHub(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw Error("event buffer capacity must be positive");
}

std::uint64_t EventHub::publish(std::string type, std::string data) {
    std::uint64_t seq = 0;
    {
        std::lock_guard lock(mu_);
        seq = next_++;
        buf_.push_back({seq, std::move(type), std::move(data)});
        if (buf_.size() > capacity_) buf_.pop_front();
    }
    cv_.notify_all();
    return seq;
}

EventHub::Batch EventHub::read_from(std::uint64_t from, std::chrono::milliseconds wait, std::size_t max) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, wait, [&] { return closed_ || next_ > from; });
    Batch b;
    b.next = std::max<std::uint64_t>(from, 1);
    if (buf_.empty() || next_ <= b.next) return b;

    const std::uint64_t oldest = buf_.front().seq;
    if (b.next < oldest) {
        b.missed = oldest - b.next;
        b.next = oldest;
    }
    for (auto it = buf_.begin() + static_cast<std::ptrdiff_t>(b.next - oldest); it != buf_.end() && b.events.size() < max;
         ++it) {
        b.events.push_back(*it);
    }
    b.next += b.events.size();
    return b;
}

std::uint64_t EventHub::next_seq() const {
    std::lock_guard lock(mu_);
    return next_;
}

void EventHub::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool EventHub::closed() const {
    std::lock_guard lock(mu_);
    return closed_;
}

}  // namespace drip::gateway
