#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drip/core/types.hpp"
#include "drip/wire/protocol.hpp"

namespace drip::fw {

/// In-memory duplex line channel standing in for the USB serial link.
/// Lines are stored without their trailing newline.
class SerialBus {
public:
    void send_to_device(std::string line) { to_device_.push_back(std::move(line)); }
    void send_to_backend(std::string line) { to_backend_.push_back(std::move(line)); }

    std::vector<std::string> drain_device_inbox() { return drain(to_device_); }
    std::vector<std::string> drain_backend_inbox() { return drain(to_backend_); }

    [[nodiscard]] std::size_t pending_to_device() const { return to_device_.size(); }
    [[nodiscard]] std::size_t pending_to_backend() const { return to_backend_.size(); }

private:
    static std::vector<std::string> drain(std::deque<std::string>& q) {
        std::vector<std::string> out(std::make_move_iterator(q.begin()), std::make_move_iterator(q.end()));
        q.clear();
        return out;
    }

    std::deque<std::string> to_device_;
    std::deque<std::string> to_backend_;
};

/// What the device can sample. Soil is read once per loop iteration; the rest
/// are read when a telemetry frame is built.
class SensorPort {
public:
    virtual ~SensorPort() = default;
    virtual SoilArray read_soil() = 0;
    /// {temperature, humidity}; kDhtUnreadable in both when the read fails.
    virtual std::pair<int, int> read_dht() = 0;
    virtual bool read_rain() = 0;
    virtual double read_flow_lpm(const RelayArray& relays) = 0;
};

inline constexpr int kDefaultThreshold = 2500;
inline constexpr std::int64_t kDefaultSendInterval = 2;

struct FirmwareState {
    Mode mode = Mode::AUTO;
    std::array<int, kPotCount> threshold{kDefaultThreshold, kDefaultThreshold, kDefaultThreshold};
    RelayArray relay{RelayState::OFF, RelayState::OFF, RelayState::OFF};
    RelayArray manual_relay_request{RelayState::OFF, RelayState::OFF, RelayState::OFF};
    std::int64_t last_send = 0;
    std::int64_t send_interval = kDefaultSendInterval;
    std::uint64_t malformed_lines = 0;
    std::uint64_t frames_sent = 0;

    [[nodiscard]] Level relay_level(std::size_t i) const { return electrical_level(relay[i]); }
};

/// Boot state: relays OFF (driven HIGH), mode AUTO, timer at zero.
FirmwareState setup(std::int64_t send_interval = kDefaultSendInterval);

/// Sets every relay threshold to the same value (single-threshold boards).
FirmwareState with_uniform_threshold(FirmwareState s, int counts);

FirmwareState update_relays(FirmwareState s, const SoilArray& soil_adc);

FirmwareState apply_command(FirmwareState s, const wire::Command& cmd);

/// Applies each line in order; malformed lines are counted, logged and skipped.
FirmwareState handle_serial_commands(FirmwareState s, std::span<const std::string> lines);

/// Builds the frame for `snap` (relay and mode fields are taken from the state).
std::string send_sensor_data(const FirmwareState& s, SensorSnapshot snap);

/// One pass of the device main loop at time `now`.
FirmwareState loop_iteration(FirmwareState s, std::int64_t now, SensorPort& sensors, SerialBus& bus);

/// True when a frame is due at `now`.
bool telemetry_due(const FirmwareState& s, std::int64_t now);

}  // namespace drip::fw
