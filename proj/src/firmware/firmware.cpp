#include "drip/firmware/firmware.hpp"

#include <spdlog/spdlog.h>

namespace drip::fw {

FirmwareState setup(std::int64_t send_interval) {
    if (send_interval < 1) throw Error("send_interval must be at least 1 s");
    FirmwareState s;
    s.send_interval = send_interval;
    return s;
}

FirmwareState with_uniform_threshold(FirmwareState s, int counts) {
    if (counts < 0 || counts > kAdcMax) throw Error("threshold out of ADC range");
    s.threshold.fill(counts);
    return s;
}

FirmwareState update_relays(FirmwareState s, const SoilArray& soil_adc) {
    switch (s.mode) {
    case Mode::AUTO:
        for (PotId pot : all_pots()) {
            const int avg = zone_average(soil_adc, pot);
            s.relay[pot.relay()] = avg > s.threshold[pot.relay()] ? RelayState::ON : RelayState::OFF;
        }
        break;
    case Mode::MANUAL:
        s.relay = s.manual_relay_request;
        break;
    case Mode::AI:
        break;  // driven by RELAY commands from the backend
    }
    return s;
}

FirmwareState apply_command(FirmwareState s, const wire::Command& cmd) {
    if (const auto* m = std::get_if<wire::ModeCmd>(&cmd)) {
        s.mode = m->mode;
    } else if (const auto* t = std::get_if<wire::ThresholdCmd>(&cmd)) {
        s.threshold[t->relay] = t->counts;
    } else if (const auto* r = std::get_if<wire::RelayCmd>(&cmd)) {
        if (s.mode == Mode::AI) {
            s.relay[r->relay] = r->state;
        } else {
            s.manual_relay_request[r->relay] = r->state;
        }
    }
    return s;
}

FirmwareState handle_serial_commands(FirmwareState s, std::span<const std::string> lines) {
    for (const auto& line : lines) {
        auto cmd = wire::parse_command(line);
        if (!cmd) {
            ++s.malformed_lines;
            spdlog::warn("firmware: dropped command '{}': {}", line, cmd.error().describe());
            continue;
        }
        s = apply_command(s, cmd.value());
    }
    return s;
}

std::string send_sensor_data(const FirmwareState& s, SensorSnapshot snap) {
    snap.relay = s.relay;
    snap.mode = s.mode;
    return wire::encode_telemetry(snap);
}

bool telemetry_due(const FirmwareState& s, std::int64_t now) {
    return now - s.last_send > s.send_interval;
}

FirmwareState loop_iteration(FirmwareState s, std::int64_t now, SensorPort& sensors, SerialBus& bus) {
    const auto pending = bus.drain_device_inbox();
    s = handle_serial_commands(std::move(s), pending);

    const SoilArray soil = sensors.read_soil();
    s = update_relays(std::move(s), soil);

    if (telemetry_due(s, now)) {
        // advance to the last grid point before now: the period equals
        // send_interval and a stalled loop does not burst frames
        s.last_send = now - 1 - (now - s.last_send - 1) % s.send_interval;

        SensorSnapshot snap;
        snap.timestamp = now;
        std::tie(snap.temperature_c, snap.humidity_pct) = sensors.read_dht();
        snap.rain_wet = sensors.read_rain();
        snap.soil_adc = soil;
        snap.flow_lpm = sensors.read_flow_lpm(s.relay);
        std::string line = send_sensor_data(s, snap);
        line.pop_back();
        bus.send_to_backend(std::move(line));
        ++s.frames_sent;
    }
    return s;
}

}  // namespace drip::fw
