#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drip/core/types.hpp"
#include "drip/wire/protocol.hpp"

namespace drip::control {

struct AiParams {
    double alpha = 0.1;  // seconds of irrigation per count of deficit
    int dur_min = 5;
    int dur_max = 120;
    std::int64_t replan_interval = 60;  // s between plans for an idle pot
    bool skip_when_raining = true;

    void validate() const;
};

struct PotPlan {
    bool irrigate = false;
    int duration_s = 0;
    friend bool operator==(const PotPlan&, const PotPlan&) = default;
};

using IrrigationPlan = std::array<PotPlan, kPotCount>;

/// need = mean(forecast) > threshold; duration = clamp(ceil(alpha * (mean - threshold)), dur_min, dur_max).
PotPlan plan_pot(double mean_forecast, int threshold, const AiParams& ai);

using ForecastSet = std::array<std::optional<std::vector<double>>, kPotCount>;

/// Plans every pot that has a forecast (counts). Pots without one get an empty
/// plan and are listed in `missing`.
struct AiDecision {
    IrrigationPlan plan{};
    std::vector<PotId> missing;
};
AiDecision run_ai_mode(const ForecastSet& forecasts, const std::array<int, kPotCount>& threshold, const AiParams& ai);

/// Backend mirror of the firmware AUTO rule.
RelayState auto_decision(const SoilArray& soil, PotId pot, int threshold) noexcept;

enum class Health { healthy, failed };

struct SensorHealth {
    std::array<Health, kSoilChannels> soil{};
    Health dht = Health::healthy;

    [[nodiscard]] bool any_failed() const noexcept;
    friend bool operator==(const SensorHealth&, const SensorHealth&) = default;
};

/// A soil channel has failed when its last k readings are all 0 or all 4095;
/// the DHT has failed when its last k frames are all unreadable. Fewer than k
/// frames never fail.
SensorHealth detect_sensor_failure(std::span<const SensorSnapshot> recent, std::size_t k);

/// Supplies per-pot forecasts in ADC counts for AI mode.
class ForecastProvider {
public:
    virtual ~ForecastProvider() = default;
    /// Frames of history needed before forecast() can answer.
    [[nodiscard]] virtual std::size_t lookback() const = 0;
    /// nullopt when there is no usable model for the pot.
    virtual std::optional<std::vector<double>> forecast(PotId pot, std::span<const SensorSnapshot> history) = 0;
};

struct ControllerConfig {
    AiParams ai;
    std::size_t failure_window = 5;
    std::array<int, kPotCount> threshold{2500, 2500, 2500};
    std::size_t divergence_frames = 2;  // consecutive disagreeing frames before a diagnostic

    void validate() const;
};

struct ControllerState {
    Mode current_mode = Mode::AUTO;
    Mode last_mode = Mode::AUTO;
    bool connected = true;
    bool failure_hold = false;
    SensorHealth health;
    std::array<int, kPotCount> threshold{2500, 2500, 2500};
    IrrigationPlan plan{};
    std::array<std::optional<std::int64_t>, kPotCount> irrigate_until{};
    std::array<std::optional<std::int64_t>, kPotCount> last_plan_at{};
    std::array<bool, kPotCount> ai_fallback{};
    RelayArray manual_request{RelayState::OFF, RelayState::OFF, RelayState::OFF};
    std::array<std::optional<std::vector<double>>, kPotCount> forecast;
    std::optional<SensorSnapshot> latest;
    std::array<std::uint64_t, 3> mode_runs{};  // run_* invocations per mode, indexed by code - 1
};

/// Result of a user command. `reason` is set when rejected.
struct Outcome {
    bool accepted = true;
    std::string reason;

    static Outcome ok() { return {}; }
    static Outcome rejected(std::string why) { return {false, std::move(why)}; }
};

/// Everything the controller wants to happen after handling an input.
struct Outbox {
    std::vector<wire::Command> commands;
    std::vector<Notification> notifications;
    [[nodiscard]] bool empty() const { return commands.empty() && notifications.empty(); }
};

/// Backend mode orchestrator. Not thread-safe: one owner feeds it inputs in
/// order and drains the outbox.
class Controller {
public:
    explicit Controller(const ControllerConfig& cfg = {}, ForecastProvider* forecaster = nullptr);

    /// Queues MODE and THRESHOLD commands that bring the device in line with this controller.
    void resync();

    Outcome set_mode(Mode m, std::int64_t now);
    Outcome request_relay(PotId pot, RelayState state, std::int64_t now);
    Outcome set_threshold(PotId pot, int counts, std::int64_t now);
    void on_connectivity_change(bool connected, std::int64_t now);

    /// One telemetry frame from the device.
    void ingest(const SensorSnapshot& snap);

    /// Periodic work at time `now`: mode dispatch, AI plan timers and replanning.
    void tick(std::int64_t now);

    /// Runs the mode function if the mode changed since the last dispatch.
    /// Returns true if it ran.
    bool dispatch(std::int64_t now);

    [[nodiscard]] const ControllerState& state() const noexcept { return s_; }
    [[nodiscard]] const ControllerConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] std::span<const SensorSnapshot> history() const;

    Outbox drain();

private:
    void run_ai_mode(std::int64_t now);
    void run_auto_mode(std::int64_t now);
    void run_manual_mode(std::int64_t now);

    void ai_service(std::int64_t now);
    void plan_pots(std::int64_t now, bool force);
    void fallback_service(const SensorSnapshot& snap);
    void mirror_check(const SensorSnapshot& snap);
    void relay_events(const SensorSnapshot& snap);
    void update_health(std::int64_t now);
    void enter_hold(std::int64_t now);
    void leave_hold(std::int64_t now);
    void all_off();

    void send(wire::Command c) { out_.commands.push_back(std::move(c)); }
    void notify(std::int64_t ts, NotificationKind kind, std::optional<std::size_t> pot, std::string msg);

    ControllerConfig cfg_;
    ForecastProvider* forecaster_;
    ControllerState s_;
    std::vector<SensorSnapshot> history_;  // bounded, oldest first
    std::size_t history_cap_;
    std::array<std::size_t, kPotCount> disagree_{};
    std::array<bool, kPotCount> diverged_{};
    std::array<std::optional<RelayState>, kPotCount> fallback_cmd_{};
    Outbox out_;
};

}  // namespace drip::control
