#include "drip/control/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drip::control {

namespace {

// Products like 0.1 * 300 land a hair above the integer; do not round those up.
constexpr double kCeilSlack = 1e-9;

bool all_stuck(std::span<const SensorSnapshot> tail, std::size_t ch, int value) {
    return std::all_of(tail.begin(), tail.end(), [&](const SensorSnapshot& s) { return s.soil_adc[ch] == value; });
}

std::string on_off(RelayState r) { return r == RelayState::ON ? "ON" : "OFF"; }

}  // namespace

void AiParams::validate() const {
    if (!(alpha > 0.0)) throw Error("ai alpha must be positive");
    if (dur_min < 1 || dur_max < dur_min) throw Error("ai durations must satisfy 1 <= dur_min <= dur_max");
    if (replan_interval < 1) throw Error("ai replan interval must be at least 1 s");
}

void ControllerConfig::validate() const {
    ai.validate();
    if (failure_window == 0) throw Error("failure window must be at least one frame");
    if (divergence_frames == 0) throw Error("divergence_frames must be at least 1");
    for (int t : threshold) {
        if (t < 0 || t > kAdcMax) throw Error("threshold out of ADC range");
    }
}

PotPlan plan_pot(double mean_forecast, int threshold, const AiParams& ai) {
    if (!(mean_forecast > threshold)) return {};
    const double raw = std::ceil(ai.alpha * (mean_forecast - threshold) - kCeilSlack);
    const double clamped = std::clamp(raw, static_cast<double>(ai.dur_min), static_cast<double>(ai.dur_max));
    return {true, static_cast<int>(clamped)};
}

AiDecision run_ai_mode(const ForecastSet& forecasts, const std::array<int, kPotCount>& threshold, const AiParams& ai) {
    AiDecision d;
    for (PotId pot : all_pots()) {
        const auto& f = forecasts[pot.index()];
        if (!f || f->empty()) {
            d.missing.push_back(pot);
            continue;
        }
        const double mean = std::accumulate(f->begin(), f->end(), 0.0) / static_cast<double>(f->size());
        d.plan[pot.index()] = plan_pot(mean, threshold[pot.index()], ai);
    }
    return d;
}

RelayState auto_decision(const SoilArray& soil, PotId pot, int threshold) noexcept {
    return zone_average(soil, pot) > threshold ? RelayState::ON : RelayState::OFF;
}

bool SensorHealth::any_failed() const noexcept {
    return dht == Health::failed || std::find(soil.begin(), soil.end(), Health::failed) != soil.end();
}

SensorHealth detect_sensor_failure(std::span<const SensorSnapshot> recent, std::size_t k) {
    SensorHealth h;
    if (k == 0 || recent.size() < k) return h;
    const auto tail = recent.last(k);
    for (std::size_t ch = 0; ch < kSoilChannels; ++ch) {
        if (all_stuck(tail, ch, 0) || all_stuck(tail, ch, kAdcMax)) h.soil[ch] = Health::failed;
    }
    if (std::none_of(tail.begin(), tail.end(), [](const SensorSnapshot& s) { return s.dht_readable(); })) {
        h.dht = Health::failed;
    }
    return h;
}

Controller::Controller(const ControllerConfig& cfg, ForecastProvider* forecaster)
    : cfg_(cfg), forecaster_(forecaster) {
    cfg_.validate();
    s_.threshold = cfg_.threshold;
    history_cap_ = std::max<std::size_t>(cfg_.failure_window, forecaster_ ? forecaster_->lookback() : 0);
    history_.reserve(history_cap_ + 1);
}

std::span<const SensorSnapshot> Controller::history() const { return history_; }

void Controller::notify(std::int64_t ts, NotificationKind kind, std::optional<std::size_t> pot, std::string msg) {
    out_.notifications.push_back({ts, kind, pot, std::move(msg)});
}

Outbox Controller::drain() {
    Outbox out = std::move(out_);
    out_ = {};
    return out;
}

void Controller::resync() {
    if (s_.failure_hold) {
        send(wire::ModeCmd{Mode::MANUAL});
        for (PotId pot : all_pots()) send(wire::RelayCmd{pot.relay(), RelayState::OFF});
    } else {
        send(wire::ModeCmd{s_.last_mode});
    }
    for (PotId pot : all_pots()) send(wire::ThresholdCmd{pot.relay(), s_.threshold[pot.index()]});
}

Outcome Controller::set_mode(Mode m, std::int64_t) {
    if (!s_.connected) return Outcome::rejected("not connected");
    s_.current_mode = m;
    return Outcome::ok();
}

Outcome Controller::request_relay(PotId pot, RelayState state, std::int64_t now) {
    if (!s_.connected) return Outcome::rejected("not connected");
    dispatch(now);
    if (s_.last_mode != Mode::MANUAL) return Outcome::rejected("manual control requires MANUAL mode");
    if (s_.failure_hold) return Outcome::rejected("irrigation halted: sensor failure");
    s_.manual_request[pot.index()] = state;
    send(wire::RelayCmd{pot.relay(), state});
    return Outcome::ok();
}

Outcome Controller::set_threshold(PotId pot, int counts, std::int64_t) {
    if (!s_.connected) return Outcome::rejected("not connected");
    if (counts < 0 || counts > kAdcMax) return Outcome::rejected("threshold must lie in [0, 4095]");
    s_.threshold[pot.index()] = counts;
    disagree_[pot.index()] = 0;
    send(wire::ThresholdCmd{pot.relay(), counts});
    return Outcome::ok();
}

void Controller::on_connectivity_change(bool connected, std::int64_t now) {
    if (connected == s_.connected) return;
    s_.connected = connected;
    if (!connected) {
        notify(now, NotificationKind::connectivity_changed, std::nullopt, "link lost");
        // MANUAL needs a user in the loop; AI and AUTO carry on
        if (s_.last_mode == Mode::MANUAL) all_off();
    } else {
        notify(now, NotificationKind::connectivity_changed, std::nullopt, "link restored");
        resync();
    }
}

void Controller::all_off() {
    for (PotId pot : all_pots()) {
        s_.manual_request[pot.index()] = RelayState::OFF;
        send(wire::RelayCmd{pot.relay(), RelayState::OFF});
    }
}

bool Controller::dispatch(std::int64_t now) {
    if (s_.current_mode == s_.last_mode) return false;
    notify(now, NotificationKind::mode_changed, std::nullopt,
           std::string("mode ") + std::string(mode_name(s_.last_mode)) + " -> " +
               std::string(mode_name(s_.current_mode)));
    s_.last_mode = s_.current_mode;
    switch (s_.current_mode) {
    case Mode::AI: run_ai_mode(now); break;
    case Mode::AUTO: run_auto_mode(now); break;
    case Mode::MANUAL: run_manual_mode(now); break;
    }
    ++s_.mode_runs[static_cast<std::size_t>(mode_code(s_.current_mode) - 1)];
    return true;
}

void Controller::run_ai_mode(std::int64_t now) {
    s_.irrigate_until = {};
    s_.last_plan_at = {};
    s_.ai_fallback = {};
    s_.plan = {};
    fallback_cmd_ = {};
    if (s_.failure_hold) return;
    send(wire::ModeCmd{Mode::AI});
    plan_pots(now, true);
}

void Controller::run_auto_mode(std::int64_t) {
    s_.irrigate_until = {};
    s_.plan = {};
    disagree_ = {};
    diverged_ = {};
    if (s_.failure_hold) return;
    send(wire::ModeCmd{Mode::AUTO});
}

void Controller::run_manual_mode(std::int64_t) {
    s_.irrigate_until = {};
    s_.plan = {};
    if (s_.failure_hold) return;
    send(wire::ModeCmd{Mode::MANUAL});
    // the device keeps old requests; clear any left ON by a previous session
    for (PotId pot : all_pots()) {
        if (s_.manual_request[pot.index()] == RelayState::ON) {
            s_.manual_request[pot.index()] = RelayState::OFF;
            send(wire::RelayCmd{pot.relay(), RelayState::OFF});
        }
    }
}

void Controller::tick(std::int64_t now) {
    dispatch(now);
    if (!s_.failure_hold && s_.last_mode == Mode::AI) ai_service(now);
}

void Controller::ai_service(std::int64_t now) {
    for (PotId pot : all_pots()) {
        auto& until = s_.irrigate_until[pot.index()];
        if (until && now >= *until) {
            send(wire::RelayCmd{pot.relay(), RelayState::OFF});
            until.reset();
            s_.plan[pot.index()] = {};
        }
    }
    plan_pots(now, false);
}

void Controller::plan_pots(std::int64_t now, bool force) {
    ForecastSet forecasts;
    std::array<bool, kPotCount> due{};
    bool any = false;
    for (PotId pot : all_pots()) {
        const std::size_t i = pot.index();
        if (s_.irrigate_until[i]) continue;
        if (!force && s_.last_plan_at[i] && now - *s_.last_plan_at[i] < cfg_.ai.replan_interval) continue;
        due[i] = any = true;
        s_.last_plan_at[i] = now;
        if (forecaster_ && history_.size() >= forecaster_->lookback()) {
            forecasts[i] = forecaster_->forecast(pot, std::span<const SensorSnapshot>(history_).last(forecaster_->lookback()));
        }
        s_.forecast[i] = forecasts[i];
    }
    if (!any) return;

    const AiDecision d = control::run_ai_mode(forecasts, s_.threshold, cfg_.ai);
    const bool raining = s_.latest && s_.latest->rain_wet && cfg_.ai.skip_when_raining;
    for (PotId pot : all_pots()) {
        const std::size_t i = pot.index();
        if (!due[i]) continue;
        if (std::find(d.missing.begin(), d.missing.end(), pot) != d.missing.end()) {
            if (!s_.ai_fallback[i]) {
                s_.ai_fallback[i] = true;
                fallback_cmd_[i].reset();
                notify(now, NotificationKind::diagnostic, i,
                       pot.name() + ": no forecast available, using threshold logic");
            }
            continue;
        }
        if (s_.ai_fallback[i]) {
            s_.ai_fallback[i] = false;
            notify(now, NotificationKind::diagnostic, i, pot.name() + ": forecast available, AI plan resumed");
        }
        PotPlan plan = d.plan[i];
        if (raining) plan = {};
        s_.plan[i] = plan;
        if (plan.irrigate) {
            send(wire::RelayCmd{pot.relay(), RelayState::ON});
            s_.irrigate_until[i] = now + plan.duration_s;
        } else if (!s_.latest || s_.latest->relay[i] == RelayState::ON) {
            send(wire::RelayCmd{pot.relay(), RelayState::OFF});
        }
    }
}

void Controller::ingest(const SensorSnapshot& snap) {
    relay_events(snap);
    s_.latest = snap;
    history_.push_back(snap);
    if (history_.size() > history_cap_) history_.erase(history_.begin());

    update_health(snap.timestamp);
    if (s_.failure_hold) return;
    if (s_.last_mode == Mode::AUTO) mirror_check(snap);
    if (s_.last_mode == Mode::AI) fallback_service(snap);
}

void Controller::relay_events(const SensorSnapshot& snap) {
    const RelayArray prev = s_.latest ? s_.latest->relay : RelayArray{RelayState::OFF, RelayState::OFF, RelayState::OFF};
    for (PotId pot : all_pots()) {
        const std::size_t i = pot.index();
        if (prev[i] == snap.relay[i]) continue;
        if (snap.relay[i] == RelayState::ON) {
            notify(snap.timestamp, NotificationKind::relay_activated, i, pot.name() + " valve opened");
        } else {
            notify(snap.timestamp, NotificationKind::relay_deactivated, i, pot.name() + " valve closed");
        }
    }
}

void Controller::update_health(std::int64_t now) {
    s_.health = detect_sensor_failure(history_, cfg_.failure_window);
    if (s_.health.any_failed() && !s_.failure_hold) {
        enter_hold(now);
    } else if (!s_.health.any_failed() && s_.failure_hold) {
        leave_hold(now);
    }
}

void Controller::enter_hold(std::int64_t now) {
    std::string what;
    std::optional<std::size_t> pot;
    for (std::size_t ch = 0; ch < kSoilChannels; ++ch) {
        if (s_.health.soil[ch] != Health::failed) continue;
        what += (what.empty() ? "" : ", ") + std::string("soil channel ") + std::to_string(ch);
        pot = pot ? (*pot == ch / 2 ? pot : std::nullopt) : std::optional<std::size_t>(ch / 2);
    }
    if (s_.health.dht == Health::failed) {
        what += (what.empty() ? "" : ", ") + std::string("temperature/humidity sensor");
        pot.reset();
    }
    notify(now, NotificationKind::sensor_failure, pot, "sensor failure (" + what + "): irrigation halted");

    s_.failure_hold = true;
    s_.irrigate_until = {};
    s_.plan = {};
    send(wire::ModeCmd{Mode::MANUAL});
    all_off();
}

void Controller::leave_hold(std::int64_t now) {
    s_.failure_hold = false;
    notify(now, NotificationKind::diagnostic, std::nullopt, "sensors recovered, resuming " +
                                                                 std::string(mode_name(s_.last_mode)) + " mode");
    resync();
    s_.last_plan_at = {};
    fallback_cmd_ = {};
    disagree_ = {};
    diverged_ = {};
}

void Controller::mirror_check(const SensorSnapshot& snap) {
    if (snap.mode != Mode::AUTO) return;  // device has not switched yet
    for (PotId pot : all_pots()) {
        const std::size_t i = pot.index();
        const RelayState expected = auto_decision(snap.soil_adc, pot, s_.threshold[i]);
        if (snap.relay[i] == expected) {
            disagree_[i] = 0;
            diverged_[i] = false;
            continue;
        }
        if (++disagree_[i] >= cfg_.divergence_frames && !diverged_[i]) {
            diverged_[i] = true;
            notify(snap.timestamp, NotificationKind::diagnostic, i,
                   pot.name() + ": device relay " + on_off(snap.relay[i]) + " disagrees with expected " +
                       on_off(expected));
        }
    }
}

void Controller::fallback_service(const SensorSnapshot& snap) {
    if (snap.mode != Mode::AI) return;
    for (PotId pot : all_pots()) {
        const std::size_t i = pot.index();
        if (!s_.ai_fallback[i]) continue;
        const RelayState want = auto_decision(snap.soil_adc, pot, s_.threshold[i]);
        if (snap.relay[i] == want) {
            fallback_cmd_[i] = want;
        } else if (fallback_cmd_[i] != want) {
            send(wire::RelayCmd{pot.relay(), want});
            fallback_cmd_[i] = want;
        }
    }
}

}  // namespace drip::control
