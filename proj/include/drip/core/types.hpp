#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace drip {

/// Base class for errors raised on rejected input or misuse of an API.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode : int { AI = 1, AUTO = 2, MANUAL = 3 };

/// Maps an integer mode code (1..3) to a Mode. Throws drip::Error otherwise;
/// callers are expected to keep their previous mode on failure.
Mode parse_mode(int code);

constexpr int mode_code(Mode m) noexcept { return static_cast<int>(m); }
std::string_view mode_name(Mode m) noexcept;

enum class Level : std::uint8_t { LOW = 0, HIGH = 1 };

/// Logical relay state. The relay board is active-low: ON is driven LOW.
enum class RelayState : std::uint8_t { OFF = 0, ON = 1 };

constexpr Level electrical_level(RelayState r) noexcept {
    return r == RelayState::ON ? Level::LOW : Level::HIGH;
}
constexpr RelayState from_level(Level l) noexcept {
    return l == Level::LOW ? RelayState::ON : RelayState::OFF;
}

inline constexpr std::size_t kPotCount = 3;
inline constexpr std::size_t kSoilChannels = 2 * kPotCount;
inline constexpr int kAdcMax = 4095;

/// Index of a pot (0..2). Pot i owns relay i and soil channels 2i and 2i+1.
class PotId {
public:
    explicit PotId(std::size_t index);

    [[nodiscard]] std::size_t index() const noexcept { return index_; }
    [[nodiscard]] std::size_t relay() const noexcept { return index_; }
    [[nodiscard]] std::array<std::size_t, 2> soil_channels() const noexcept {
        return {2 * index_, 2 * index_ + 1};
    }
    [[nodiscard]] std::string name() const { return "pot_" + std::to_string(index_ + 1); }

    friend bool operator==(PotId, PotId) = default;

private:
    std::size_t index_;
};

std::array<PotId, kPotCount> all_pots();

using RelayArray = std::array<RelayState, kPotCount>;
using SoilArray = std::array<int, kSoilChannels>;

/// DHT11 readings use -1 for both fields when the sensor could not be read.
inline constexpr int kDhtUnreadable = -1;

struct SensorSnapshot {
    std::int64_t timestamp = 0;  // seconds of sim time
    int temperature_c = 0;
    int humidity_pct = 0;
    bool rain_wet = false;
    double flow_lpm = 0.0;
    SoilArray soil_adc{};
    RelayArray relay{RelayState::OFF, RelayState::OFF, RelayState::OFF};
    Mode mode = Mode::AUTO;

    [[nodiscard]] bool dht_readable() const noexcept {
        return temperature_c != kDhtUnreadable && humidity_pct != kDhtUnreadable;
    }

    friend bool operator==(const SensorSnapshot&, const SensorSnapshot&) = default;
};

/// Floor of the mean of a pot's two soil channels.
int zone_average(const SoilArray& soil, PotId pot) noexcept;

enum class NotificationKind {
    relay_activated,
    relay_deactivated,
    sensor_failure,
    mode_changed,
    connectivity_changed,
    diagnostic,
};

std::string_view kind_name(NotificationKind k) noexcept;

struct Notification {
    std::int64_t timestamp = 0;
    NotificationKind kind = NotificationKind::diagnostic;
    std::optional<std::size_t> pot;
    std::string message;

    friend bool operator==(const Notification&, const Notification&) = default;
};

}  // namespace drip
