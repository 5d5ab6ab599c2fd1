#include "drip/app/twin.hpp"

#include <spdlog/spdlog.h>

namespace drip::app {

void TwinConfig::validate() const {
    sim.validate();
    controller.validate();
    if (send_interval < 1) throw Error("send_interval must be at least 1 s");
}

std::pair<int, int> PlantSensors::read_dht() {
    const auto r = plant_.read_dht();
    return {r.temperature_c, r.humidity_pct};
}

Twin::Twin(const TwinConfig& cfg, control::ForecastProvider* forecaster, std::int64_t start)
    : cfg_(cfg),
      dt_(static_cast<std::int64_t>(cfg.sim.dt)),
      now_(start),
      plant_(cfg.sim),
      sensors_(plant_),
      fw_(fw::setup(cfg.send_interval)),
      controller_(cfg.controller, forecaster) {
    cfg_.validate();
    fw_.last_send = start;
    controller_.resync();
    flush_controller();
}

void Twin::flush_controller() {
    auto out = controller_.drain();
    for (const auto& c : out.commands) bus_.send_to_device(wire::format_command(c));
    if (note_sink_) {
        for (const auto& n : out.notifications) note_sink_(n);
    }
}

void Twin::step() {
    const RelayArray valves = fw_.relay;
    for (std::size_t i = 0; i < kPotCount; ++i) on_ticks_[i] += valves[i] == RelayState::ON;
    now_ += dt_;
    plant_.advance(static_cast<double>(now_), valves);

    fw_ = fw::loop_iteration(std::move(fw_), now_, sensors_, bus_);

    for (const auto& line : bus_.drain_backend_inbox()) {
        auto parsed = wire::parse_telemetry(line);
        if (!parsed) {
            ++bad_frames_;
            spdlog::warn("backend: dropped frame: {}", parsed.error().describe());
            continue;
        }
        const SensorSnapshot& snap = parsed.value();
        ++frames_;
        if (log_) log_->append(snap);
        if (frame_sink_) frame_sink_(snap);
        controller_.ingest(snap);
        flush_controller();
    }
    controller_.tick(now_);
    flush_controller();
}

void Twin::run_until(std::int64_t t) {
    while (now_ < t) step();
}

}  // namespace drip::app
