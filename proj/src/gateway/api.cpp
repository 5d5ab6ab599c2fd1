#include "drip/gateway/api.hpp"

#include <charconv>

#include "drip/wire/protocol.hpp"

namespace drip::gateway {

namespace {

std::optional<long long> parse_int(std::string_view body) {
    const auto b = body.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return std::nullopt;
    const auto e = body.find_last_not_of(" \t\r\n");
    body = body.substr(b, e - b + 1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc{} || ptr != body.data() + body.size()) return std::nullopt;
    return v;
}

PinResult from_outcome(const control::Outcome& o) {
    if (o.accepted) return {};
    return {409, o.reason};
}

std::string_view health_name(control::Health h) { return h == control::Health::healthy ? "healthy" : "failed"; }

}  // namespace

PinResult apply_pin_write(control::Controller& c, std::string_view pin, std::string_view body, std::int64_t now) {
    if (pin != "V5" && pin != "V6" && pin != "V7" && pin != "V8" && pin != "V9") {
        return {404, "unknown pin " + std::string(pin)};
    }
    const auto value = parse_int(body);
    if (!value) return {400, "body must be an integer"};

    if (pin == "V9") {
        if (*value < 1 || *value > 3) return {400, "mode must be 1 (AI), 2 (AUTO) or 3 (MANUAL)"};
        return from_outcome(c.set_mode(parse_mode(static_cast<int>(*value)), now));
    }
    if (pin == "V8") {
        const long long pot = *value / kThresholdPotStride;
        const long long counts = *value % kThresholdPotStride;
        if (*value < 0 || pot >= static_cast<long long>(kPotCount) || counts > kAdcMax) {
            return {400, "V8 value must be pot*10000 + counts with pot 0..2 and counts 0..4095"};
        }
        return from_outcome(c.set_threshold(PotId(static_cast<std::size_t>(pot)), static_cast<int>(counts), now));
    }
    if (*value != 0 && *value != 1) return {400, "valve value must be 0 or 1"};
    const PotId pot(static_cast<std::size_t>(pin[1] - '5'));
    return from_outcome(c.request_relay(pot, *value ? RelayState::ON : RelayState::OFF, now));
}

nlohmann::ordered_json frame_json(const SensorSnapshot& s) {
    std::string line = wire::encode_telemetry(s);
    line.pop_back();
    return nlohmann::ordered_json::parse(line);
}

nlohmann::ordered_json notification_json(const Notification& n) {
    nlohmann::ordered_json j;
    j["ts"] = n.timestamp;
    j["kind"] = std::string(kind_name(n.kind));
    j["pot"] = n.pot ? nlohmann::ordered_json(*n.pot) : nlohmann::ordered_json(nullptr);
    j["message"] = n.message;
    return j;
}

nlohmann::ordered_json state_json(const control::ControllerState& s, std::int64_t now) {
    using json = nlohmann::ordered_json;
    json j;
    j["time"] = now;
    j["mode"] = std::string(mode_name(s.current_mode));
    j["mode_code"] = mode_code(s.current_mode);
    j["connected"] = s.connected;
    j["failure_hold"] = s.failure_hold;

    const RelayArray relays = s.latest ? s.latest->relay : RelayArray{RelayState::OFF, RelayState::OFF, RelayState::OFF};
    j["relays"] = json::array();
    for (auto r : relays) j["relays"].push_back(r == RelayState::ON ? 1 : 0);
    j["thresholds"] = s.threshold;
    j["latest"] = s.latest ? frame_json(*s.latest) : json(nullptr);

    json soil = json::array();
    for (auto h : s.health.soil) soil.push_back(std::string(health_name(h)));
    j["sensor_health"] = {{"soil", soil}, {"dht", std::string(health_name(s.health.dht))}};

    json plan = json::array();
    for (std::size_t i = 0; i < kPotCount; ++i) {
        json p = {{"irrigate", s.plan[i].irrigate}, {"duration_s", s.plan[i].duration_s}};
        p["until"] = s.irrigate_until[i] ? json(*s.irrigate_until[i]) : json(nullptr);
        p["fallback"] = s.ai_fallback[i];
        plan.push_back(p);
    }
    j["plan"] = plan;

    json forecast = json::array();
    for (const auto& f : s.forecast) forecast.push_back(f ? json(*f) : json(nullptr));
    j["forecast"] = forecast;
    return j;
}

}  // namespace drip::gateway
