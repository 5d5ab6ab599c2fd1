#include "drip/core/types.hpp"

namespace drip {

Mode parse_mode(int code) {
    switch (code) {
    case 1: return Mode::AI;
    case 2: return Mode::AUTO;
    case 3: return Mode::MANUAL;
    default: throw Error("mode code out of range: " + std::to_string(code));
    }
}

std::string_view mode_name(Mode m) noexcept {
    switch (m) {
    case Mode::AI: return "AI";
    case Mode::AUTO: return "AUTO";
    case Mode::MANUAL: return "MANUAL";
    }
    return "?";
}

PotId::PotId(std::size_t index) : index_(index) {
    if (index >= kPotCount) {
        throw Error("pot index out of range: " + std::to_string(index));
    }
}

std::array<PotId, kPotCount> all_pots() { return {PotId(0), PotId(1), PotId(2)}; }

int zone_average(const SoilArray& soil, PotId pot) noexcept {
    const auto [a, b] = pot.soil_channels();
    // readings are non-negative so integer division floors
    return (soil[a] + soil[b]) / 2;
}

std::string_view kind_name(NotificationKind k) noexcept {
    switch (k) {
    case NotificationKind::relay_activated: return "relay_activated";
    case NotificationKind::relay_deactivated: return "relay_deactivated";
    case NotificationKind::sensor_failure: return "sensor_failure";
    case NotificationKind::mode_changed: return "mode_changed";
    case NotificationKind::connectivity_changed: return "connectivity_changed";
    case NotificationKind::diagnostic: return "diagnostic";
    }
    return "?";
}

}  // namespace drip
