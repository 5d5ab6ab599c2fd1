#include "drip/app/runtime.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "drip/wire/protocol.hpp"

namespace drip::app {

namespace {

std::int64_t resume_time(const store::TelemetryLog& log) {
    const auto last = log.latest();
    return last ? last->timestamp : 0;
}

}  // namespace

Runtime::Runtime(const AppConfig& cfg, std::unique_ptr<store::TelemetryLog> log, control::ForecastProvider* forecaster)
    : cfg_(cfg),
      log_(log ? std::move(log) : std::make_unique<store::TelemetryLog>()),
      hub_(cfg.gateway.event_buffer),
      twin_(cfg.twin, forecaster, resume_time(*log_)) {
    twin_.attach_log(log_.get());
    twin_.on_frame([this](const SensorSnapshot& s) {
        std::string line = wire::encode_telemetry(s);
        line.pop_back();
        hub_.publish("telemetry", std::move(line));
    });
    twin_.on_notification([this](const Notification& n) {
        spdlog::info("[{}] {}", kind_name(n.kind), n.message);
        hub_.publish("notification", gateway::notification_json(n).dump());
    });
    if (twin_.now() > 0) spdlog::info("resuming at t={} from {} logged frames", twin_.now(), log_->size());
}

Runtime::~Runtime() { stop(); }

void Runtime::start() {
    if (running_.exchange(true)) return;
    worker_ = std::thread([this] { loop(); });
}

void Runtime::stop() {
    if (running_.exchange(false)) {
        wake_.notify_all();
    }
    if (worker_.joinable()) worker_.join();
    hub_.close();
    log_->flush();
}

void Runtime::loop() {
    using clock = std::chrono::steady_clock;
    const double scale = cfg_.gateway.time_scale;
    const auto tick = scale > 0 ? std::chrono::duration_cast<clock::duration>(
                                      std::chrono::duration<double>(static_cast<double>(twin_.dt()) / scale))
                                : clock::duration::zero();
    auto deadline = clock::now();
    while (running_) {
        try {
            pump(1);
        } catch (const std::exception& e) {
            spdlog::error("control loop stopped: {}", e.what());
            running_ = false;
            break;
        }
        if (tick == clock::duration::zero()) continue;
        deadline += tick;
        // after a long stall, do not try to catch up in a burst
        if (clock::now() - deadline > 10 * tick) deadline = clock::now();
        std::unique_lock lk(wake_mu_);
        wake_.wait_until(lk, deadline, [this] { return !running_; });
    }
}

void Runtime::pump(std::size_t ticks) {
    for (std::size_t i = 0; i < ticks; ++i) {
        std::lock_guard lk(mu_);
        twin_.step();
    }
}

gateway::PinResult Runtime::write_pin(std::string_view pin, std::string_view body) {
    std::lock_guard lk(mu_);
    auto r = gateway::apply_pin_write(twin_.controller(), pin, body, twin_.now());
    twin_.flush_controller();
    return r;
}

nlohmann::ordered_json Runtime::state() {
    std::lock_guard lk(mu_);
    return gateway::state_json(twin_.controller().state(), twin_.now());
}

std::vector<SensorSnapshot> Runtime::telemetry(std::int64_t from, std::int64_t to) { return log_->range(from, to); }

void Runtime::set_connected(bool connected) {
    std::lock_guard lk(mu_);
    twin_.controller().on_connectivity_change(connected, twin_.now());
    twin_.flush_controller();
}

void Runtime::set_stuck_soil(std::size_t channel, std::optional<int> counts) {
    if (channel >= kSoilChannels) throw Error("soil channel out of range");
    std::lock_guard lk(mu_);
    twin_.plant().faults().stuck_soil[channel] = counts;
}

void Runtime::set_dht_unreadable(bool unreadable) {
    std::lock_guard lk(mu_);
    twin_.plant().faults().dht_unreadable = unreadable;
}

std::int64_t Runtime::now() const {
    std::lock_guard lk(mu_);
    return twin_.now();
}

}  // namespace drip::app
