#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "drip/control/controller.hpp"

namespace drip::gateway {

/// HTTP-style status plus a human-readable reason.
struct PinResult {
    int status = 200;
    std::string message = "ok";
};

/// Encoding of a V8 write: pot index * 10000 + threshold counts.
inline constexpr int kThresholdPotStride = 10000;

/// Maps a virtual-pin write onto the controller:
///   V5..V7  0|1       manual valve request for pot 0..2 (MANUAL mode only)
///   V8      pot*10000 + counts   threshold update
///   V9      1|2|3     mode (AI, AUTO, MANUAL)
/// 404 for an unknown pin, 400 for a malformed or out-of-range value, 409 when
/// the controller refuses the request in its current state.
PinResult apply_pin_write(control::Controller& c, std::string_view pin, std::string_view body, std::int64_t now);

/// Snapshot served by GET /state.
nlohmann::ordered_json state_json(const control::ControllerState& s, std::int64_t now);

nlohmann::ordered_json notification_json(const Notification& n);

/// The canonical wire frame, embedded as a JSON object.
nlohmann::ordered_json frame_json(const SensorSnapshot& s);

}  // namespace drip::gateway
