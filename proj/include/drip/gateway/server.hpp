#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "drip/gateway/api.hpp"
#include "drip/gateway/events.hpp"

namespace httplib {
class Server;
}

namespace drip::gateway {

/// What the HTTP layer needs from the running system. Implementations must be
/// safe to call from several request threads at once.
class Backend {
public:
    virtual ~Backend() = default;
    virtual PinResult write_pin(std::string_view pin, std::string_view body) = 0;
    virtual nlohmann::ordered_json state() = 0;
    virtual std::vector<SensorSnapshot> telemetry(std::int64_t from, std::int64_t to) = 0;
    virtual EventHub& events() = 0;
};

struct ServerOptions {
    std::string bind = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::string token;
};

/// GET /state, GET /telemetry?from=&to=, POST /pin/{V5..V9}, GET /events (SSE).
/// Every request needs `Authorization: Bearer <token>`; /events also accepts
/// `?token=` because browser EventSource cannot set headers. /events starts
/// at new events, or after `Last-Event-ID`, or at `?since=<id>`.
class Server {
public:
    Server(Backend& backend, ServerOptions opts);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the socket. Throws drip::Error if the address is unavailable.
    void bind();
    [[nodiscard]] int port() const noexcept { return port_; }

    /// Serves until stop(). Call bind() first. stop() may come from any thread.
    void run();
    void stop();

private:
    void routes();

    Backend& backend_;
    ServerOptions opts_;
    std::unique_ptr<httplib::Server> http_;
    std::atomic<bool> stopping_{false};
    std::atomic<bool> entered_{false};
    std::atomic<bool> finished_{false};
    int port_ = 0;
};

}  // namespace drip::gateway
