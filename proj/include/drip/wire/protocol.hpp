#pragma once

// Line protocol between the device and the backend.
//
//   backend -> device:  MODE <1|2|3> | THRESHOLD <0-2> <0-4095> | RELAY <0-2> <ON|OFF>
//   device  -> backend: one JSON object per line, keys in canonical order
//                       ts, temp, hum, rain, flow, soil[6], relay[3], mode
//
// See docs/protocol.md for the byte-level description.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "drip/core/types.hpp"

namespace drip::wire {

struct ModeCmd {
    Mode mode;
    friend bool operator==(const ModeCmd&, const ModeCmd&) = default;
};
struct ThresholdCmd {
    std::size_t relay;
    int counts;
    friend bool operator==(const ThresholdCmd&, const ThresholdCmd&) = default;
};
struct RelayCmd {
    std::size_t relay;
    RelayState state;
    friend bool operator==(const RelayCmd&, const RelayCmd&) = default;
};

using Command = std::variant<ModeCmd, ThresholdCmd, RelayCmd>;

/// A rejected line. `column` is 1-based and points at the offending token.
struct ParseError {
    std::size_t column = 0;
    std::string token;
    std::string message;

    [[nodiscard]] std::string describe() const;
};

template <typename T>
class Parsed {
public:
    Parsed(T value) : v_(std::move(value)) {}            // NOLINT(google-explicit-constructor)
    Parsed(ParseError err) : v_(std::move(err)) {}       // NOLINT(google-explicit-constructor)

    [[nodiscard]] bool ok() const noexcept { return std::holds_alternative<T>(v_); }
    explicit operator bool() const noexcept { return ok(); }

    [[nodiscard]] const T& value() const& { return std::get<T>(v_); }
    [[nodiscard]] T&& value() && { return std::get<T>(std::move(v_)); }
    [[nodiscard]] const ParseError& error() const& { return std::get<ParseError>(v_); }

private:
    std::variant<T, ParseError> v_;
};

Parsed<Command> parse_command(std::string_view line);

/// Command text without the trailing newline.
std::string format_command(const Command& cmd);

/// Shortest round-tripping fixed notation, always with a fractional part.
std::string format_flow(double flow);

/// Canonical telemetry line, terminated by '\n'.
std::string encode_telemetry(const SensorSnapshot& snap);

/// Strict inverse of encode_telemetry. Accepts an optional trailing "\n" or "\r\n";
/// JSON whitespace between tokens is tolerated, unknown or duplicate keys are not.
Parsed<SensorSnapshot> parse_telemetry(std::string_view line);

/// Value ranges enforced by the frame parser.
inline constexpr int kTempMin = 0;
inline constexpr int kTempMax = 50;
inline constexpr int kHumMin = 20;
inline constexpr int kHumMax = 90;
inline constexpr double kFlowMax = 1000.0;

}  // namespace drip::wire
