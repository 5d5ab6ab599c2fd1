#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>

#include "drip/core/types.hpp"

namespace drip::sim {

using Rng = std::mt19937_64;

struct WeatherConfig {
    double t_mean = 20.0;  // degC
    double t_amp = 8.0;
    double h_mean = 60.0;  // %RH
    double h_amp = 15.0;
    double rain_mean_interval_s = 28800.0;  // mean dry spell; <= 0 disables rain
    double rain_mean_duration_s = 3600.0;
    double rain_rate = 1e-4;  // moisture fraction per second while raining
};

struct SimConfig {
    double dt = 1.0;        // seconds per tick
    double e0 = 8e-7;       // evaporation per degC per s
    double t0 = 5.0;        // evaporation onset, degC
    double d = 2e-7;        // drainage per s
    double q_irr = 5e-4;    // inflow per s per open valve
    double m_sat = 0.45;
    int adc_dry = 3500;
    int adc_wet = 1200;
    double noise_sigma = 8.0;    // ADC counts
    double pulses_per_l = 450.0;  // 7.5 Hz per L/min
    double lpm_per_valve = 2.0;
    std::uint64_t seed = 1;
    std::array<double, kPotCount> initial_moisture{0.30, 0.26, 0.34};
    std::array<double, kPotCount> evap_factor{1.0, 1.25, 0.8};
    WeatherConfig weather;

    /// Throws drip::Error describing the first violated constraint.
    void validate() const;
};

struct WeatherState {
    double temperature_c = 20.0;
    double humidity_pct = 60.0;
    bool raining = false;
    double rain_rate = 0.0;

    friend bool operator==(const WeatherState&, const WeatherState&) = default;
};

struct PotState {
    double moisture = 0.0;
    double m_sat = 0.45;
    double evap_factor = 1.0;

    friend bool operator==(const PotState&, const PotState&) = default;
};

/// Weather at time t. Temperature and humidity are diurnal sinusoids in
/// antiphase; rain is a two-state Markov process advanced by one tick.
WeatherState step_weather(const WeatherState& w, double t, const SimConfig& cfg, Rng& rng);

/// One explicit-Euler step of the leaky-bucket soil model, clamped to [0, m_sat].
PotState step_pot(const PotState& p, const WeatherState& w, bool valve_open, const SimConfig& cfg);

/// Unclamped moisture increment of step_pot, exposed for water accounting.
double pot_flux(const PotState& p, const WeatherState& w, bool valve_open, const SimConfig& cfg);

/// Resistive probe model: higher counts mean drier soil. channel must be 0 or 1.
int read_soil_adc(const PotState& p, int channel, const SimConfig& cfg, Rng& rng);

struct FlowReading {
    double flow_lpm = 0.0;
    double pulse_hz = 0.0;
};

FlowReading read_flow(const RelayArray& relays, const SimConfig& cfg);

struct DhtReading {
    int temperature_c = kDhtUnreadable;
    int humidity_pct = kDhtUnreadable;
};

/// Truncates to integers and clamps to the DHT11's 0-50 degC / 20-90 %RH band.
DhtReading read_dht(const WeatherState& w);

/// Injected transducer faults used by failure scenarios.
struct SensorFaults {
    std::array<std::optional<int>, kSoilChannels> stuck_soil{};
    bool dht_unreadable = false;
};

/// Integrates flow-meter readings into per-pot delivered water. A single meter
/// measures the manifold; volume is attributed evenly to the open valves.
class WaterMeter {
public:
    void record(const RelayArray& relays, double flow_lpm, double dt_s);

    [[nodiscard]] double liters(PotId pot) const { return liters_[pot.index()]; }
    [[nodiscard]] double total_liters() const;
    /// Delivered water expressed as a moisture increment for the pot.
    [[nodiscard]] double moisture_equivalent(PotId pot, const SimConfig& cfg) const;

private:
    std::array<double, kPotCount> liters_{};
};

/// Greenhouse stand-in: weather plus three pots and their sensors, all driven
/// from one seeded generator.
class Plant {
public:
    explicit Plant(const SimConfig& cfg);

    /// Advances weather and pots by one tick ending at time t with the given valve states.
    void advance(double t, const RelayArray& valves);

    [[nodiscard]] SoilArray read_soil();
    [[nodiscard]] DhtReading read_dht() const;
    [[nodiscard]] bool rain_wet() const { return weather_.raining; }
    [[nodiscard]] FlowReading read_flow(const RelayArray& relays) const {
        return sim::read_flow(relays, cfg_);
    }

    [[nodiscard]] const WeatherState& weather() const { return weather_; }
    [[nodiscard]] const PotState& pot(PotId id) const { return pots_[id.index()]; }
    [[nodiscard]] const SimConfig& config() const { return cfg_; }
    [[nodiscard]] const WaterMeter& meter() const { return meter_; }

    SensorFaults& faults() { return faults_; }
    void set_moisture(PotId id, double m);

private:
    SimConfig cfg_;
    Rng rng_;
    WeatherState weather_;
    std::array<PotState, kPotCount> pots_{};
    SensorFaults faults_;
    WaterMeter meter_;
};

}  // namespace drip::sim
