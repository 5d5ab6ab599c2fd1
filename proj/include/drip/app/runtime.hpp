#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>

#include "drip/app/config.hpp"
#include "drip/app/twin.hpp"
#include "drip/gateway/server.hpp"

namespace drip::app {

/// The live system behind the gateway: a twin, its telemetry log and the
/// event stream. Request threads and the control thread share one lock
/// around the twin, so a pin write lands between two ticks.
class Runtime final : public gateway::Backend {
public:
    /// The sim clock resumes from the newest record in `log`.
    Runtime(const AppConfig& cfg, std::unique_ptr<store::TelemetryLog> log,
            control::ForecastProvider* forecaster = nullptr);
    ~Runtime() override;

    Runtime(const Runtime&) = delete;
    Runtime& operator=(const Runtime&) = delete;

    /// Starts the control thread, paced by gateway.time_scale.
    void start();
    /// Stops the control thread, closes the event stream and flushes the log.
    void stop();

    /// Advances `ticks` steps on the calling thread. For tests and tools that
    /// drive time themselves; do not mix with start().
    void pump(std::size_t ticks = 1);

    gateway::PinResult write_pin(std::string_view pin, std::string_view body) override;
    nlohmann::ordered_json state() override;
    std::vector<SensorSnapshot> telemetry(std::int64_t from, std::int64_t to) override;
    gateway::EventHub& events() override { return hub_; }

    // Fault injection.
    void set_connected(bool connected);
    void set_stuck_soil(std::size_t channel, std::optional<int> counts);
    void set_dht_unreadable(bool unreadable);

    [[nodiscard]] std::int64_t now() const;
    [[nodiscard]] const store::TelemetryLog& log() const noexcept { return *log_; }

private:
    void loop();

    AppConfig cfg_;
    std::unique_ptr<store::TelemetryLog> log_;
    gateway::EventHub hub_;
    mutable std::mutex mu_;
    Twin twin_;

    std::thread worker_;
    std::mutex wake_mu_;
    std::condition_variable wake_;
    std::atomic<bool> running_{false};
};

}  // namespace drip::app
