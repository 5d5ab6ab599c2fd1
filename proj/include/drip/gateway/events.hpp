#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

namespace drip::gateway {

struct Event {
    std::uint64_t seq = 0;
    std::string type;  // "telemetry" | "notification"
    std::string data;  // one JSON document
};

/// Fan-out buffer for the live event stream. Keeps the newest `capacity`
/// events; every reader tracks its own cursor, and a reader that falls behind
/// the oldest kept event learns how many it missed.
class EventHub {
public:
    explicit EventHub(std::size_t capacity);

    std::uint64_t publish(std::string type, std::string data);

    struct Batch {
        std::vector<Event> events;
        std::uint64_t missed = 0;  // events dropped before the reader got to them
        std::uint64_t next = 0;    // cursor for the following read
    };

    /// Events with seq >= from (at most `max`). Blocks up to `wait` when none
    /// are available yet; returns an empty batch on timeout or close.
    Batch read_from(std::uint64_t from, std::chrono::milliseconds wait, std::size_t max = 256);

    /// Sequence number the next published event will get. Seqs start at 1.
    [[nodiscard]] std::uint64_t next_seq() const;

    void close();
    [[nodiscard]] bool closed() const;

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Event> buf_;
    std::size_t capacity_;
    std::uint64_t next_ = 1;
    bool closed_ = false;
};

}  // namespace drip::gateway
