#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "drip/control/controller.hpp"
#include "drip/firmware/firmware.hpp"
#include "drip/sim/plant.hpp"
#include "drip/store/telemetry_log.hpp"

namespace drip::app {

struct TwinConfig {
    sim::SimConfig sim;
    std::int64_t send_interval = fw::kDefaultSendInterval;
    control::ControllerConfig controller;

    void validate() const;
};

/// Device-side view of the simulated plant.
class PlantSensors final : public fw::SensorPort {
public:
    explicit PlantSensors(sim::Plant& plant) : plant_(plant) {}
    SoilArray read_soil() override { return plant_.read_soil(); }
    std::pair<int, int> read_dht() override;
    bool read_rain() override { return plant_.rain_wet(); }
    double read_flow_lpm(const RelayArray& relays) override { return plant_.read_flow(relays).flow_lpm; }

private:
    sim::Plant& plant_;
};

/// Closed loop: weather and pots, the emulated firmware, the serial bus and
/// the backend controller, advanced together one sim tick at a time.
///
/// Per tick: pots integrate over the tick with the valves as they were, the
/// firmware runs one loop (commands, relays, maybe a frame), then the backend
/// ingests frames, runs its periodic work and queues commands for the next
/// firmware loop.
class Twin {
public:
    using FrameSink = std::function<void(const SensorSnapshot&)>;
    using NotificationSink = std::function<void(const Notification&)>;

    /// `start` is the sim clock before the first step; a restarted gateway
    /// passes the last logged timestamp so appends stay ordered.
    explicit Twin(const TwinConfig& cfg, control::ForecastProvider* forecaster = nullptr, std::int64_t start = 0);

    /// Frames are appended here (if set) before the controller sees them.
    void attach_log(store::TelemetryLog* log) { log_ = log; }
    void on_frame(FrameSink sink) { frame_sink_ = std::move(sink); }
    void on_notification(NotificationSink sink) { note_sink_ = std::move(sink); }

    void step();
    /// Steps until now() >= t.
    void run_until(std::int64_t t);

    [[nodiscard]] std::int64_t now() const noexcept { return now_; }
    [[nodiscard]] std::int64_t dt() const noexcept { return dt_; }

    sim::Plant& plant() noexcept { return plant_; }
    [[nodiscard]] const sim::Plant& plant() const noexcept { return plant_; }
    [[nodiscard]] const fw::FirmwareState& firmware() const noexcept { return fw_; }
    control::Controller& controller() noexcept { return controller_; }
    [[nodiscard]] const control::Controller& controller() const noexcept { return controller_; }

    /// Moves queued controller commands onto the bus and hands notifications to the sink.
    void flush_controller();

    [[nodiscard]] std::uint64_t frames() const noexcept { return frames_; }
    [[nodiscard]] std::uint64_t bad_frames() const noexcept { return bad_frames_; }
    [[nodiscard]] const std::array<std::uint64_t, kPotCount>& relay_on_ticks() const noexcept { return on_ticks_; }

private:
    TwinConfig cfg_;
    std::int64_t dt_;
    std::int64_t now_ = 0;
    sim::Plant plant_;
    PlantSensors sensors_;
    fw::FirmwareState fw_;
    fw::SerialBus bus_;
    control::Controller controller_;
    store::TelemetryLog* log_ = nullptr;
    FrameSink frame_sink_;
    NotificationSink note_sink_;
    std::uint64_t frames_ = 0;
    std::uint64_t bad_frames_ = 0;
    std::array<std::uint64_t, kPotCount> on_ticks_{};
};

}  // namespace drip::app
