#include "drip/sim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace drip::sim {

namespace {
constexpr double kSecondsPerDay = 86400.0;
}

void SimConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(std::string("invalid sim config: ") + what);
    };
    require(dt > 0.0 && dt <= 10.0, "dt must lie in (0, 10] s");
    require(dt == std::floor(dt), "dt must be a whole number of seconds");
    require(e0 >= 0.0 && d >= 0.0 && q_irr >= 0.0, "rates must be non-negative");
    require(m_sat > 0.0 && m_sat <= 1.0, "m_sat must lie in (0, 1]");
    require(adc_dry > adc_wet, "adc_dry must exceed adc_wet");
    require(adc_wet >= 0 && adc_dry <= kAdcMax, "calibration outside ADC range");
    require(noise_sigma >= 0.0, "noise_sigma must be non-negative");
    require(pulses_per_l > 0.0, "pulses_per_l must be positive");
    require(lpm_per_valve > 0.0 && lpm_per_valve * kPotCount <= 30.0,
            "lpm_per_valve must keep total flow within the 30 L/min sensor range");
    for (double m : initial_moisture) require(m >= 0.0 && m <= m_sat, "initial moisture outside [0, m_sat]");
    for (double f : evap_factor) require(f >= 0.0, "evap_factor must be non-negative");
    require(weather.h_mean >= 0.0 && weather.h_mean <= 100.0, "h_mean outside [0, 100]");
    require(weather.rain_mean_duration_s > 0.0, "rain_mean_duration_s must be positive");
    require(weather.rain_rate >= 0.0, "rain_rate must be non-negative");
}

WeatherState step_weather(const WeatherState& w, double t, const SimConfig& cfg, Rng& rng) {
    const auto& wc = cfg.weather;
    const double phase = std::sin(2.0 * std::numbers::pi * t / kSecondsPerDay);

    WeatherState next;
    next.temperature_c = wc.t_mean + wc.t_amp * phase;
    next.humidity_pct = std::clamp(wc.h_mean - wc.h_amp * phase, 0.0, 100.0);

    next.raining = w.raining;
    if (wc.rain_mean_interval_s > 0.0) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double mean = w.raining ? wc.rain_mean_duration_s : wc.rain_mean_interval_s;
        if (u(rng) < -std::expm1(-cfg.dt / mean)) next.raining = !w.raining;
    } else {
        next.raining = false;
    }
    next.rain_rate = next.raining ? wc.rain_rate : 0.0;
    return next;
}

double pot_flux(const PotState& p, const WeatherState& w, bool valve_open, const SimConfig& cfg) {
    const double inflow = (valve_open ? cfg.q_irr : 0.0) + (w.raining ? w.rain_rate : 0.0);
    const double evap = cfg.e0 * p.evap_factor * std::max(0.0, w.temperature_c - cfg.t0) *
                        (1.0 - w.humidity_pct / 100.0);
    return cfg.dt * (inflow - evap - cfg.d * p.moisture);
}

PotState step_pot(const PotState& p, const WeatherState& w, bool valve_open, const SimConfig& cfg) {
    PotState next = p;
    next.moisture = std::clamp(p.moisture + pot_flux(p, w, valve_open, cfg), 0.0, p.m_sat);
    return next;
}

int read_soil_adc(const PotState& p, int channel, const SimConfig& cfg, Rng& rng) {
    if (channel != 0 && channel != 1) throw Error("soil channel must be 0 or 1");
    const double span = static_cast<double>(cfg.adc_dry - cfg.adc_wet);
    double counts = cfg.adc_dry - span * (p.moisture / p.m_sat);
    if (cfg.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        counts += noise(rng);
    }
    return std::clamp(static_cast<int>(std::lround(counts)), 0, kAdcMax);
}

FlowReading read_flow(const RelayArray& relays, const SimConfig& cfg) {
    const auto open = std::count(relays.begin(), relays.end(), RelayState::ON);
    FlowReading r;
    r.flow_lpm = cfg.lpm_per_valve * static_cast<double>(open);
    r.pulse_hz = cfg.pulses_per_l * r.flow_lpm / 60.0;
    return r;
}

DhtReading read_dht(const WeatherState& w) {
    DhtReading r;
    r.temperature_c = std::clamp(static_cast<int>(std::trunc(w.temperature_c)), 0, 50);
    r.humidity_pct = std::clamp(static_cast<int>(std::trunc(w.humidity_pct)), 20, 90);
    return r;
}

void WaterMeter::record(const RelayArray& relays, double flow_lpm, double dt_s) {
    const auto open = std::count(relays.begin(), relays.end(), RelayState::ON);
    if (open == 0) return;
    const double share = flow_lpm / static_cast<double>(open) * dt_s / 60.0;
    for (std::size_t i = 0; i < kPotCount; ++i) {
        if (relays[i] == RelayState::ON) liters_[i] += share;
    }
}

double WaterMeter::total_liters() const { return liters_[0] + liters_[1] + liters_[2]; }

double WaterMeter::moisture_equivalent(PotId pot, const SimConfig& cfg) const {
    // an open valve passes lpm_per_valve/60 L/s and adds q_irr moisture per s
    return liters_[pot.index()] * cfg.q_irr * 60.0 / cfg.lpm_per_valve;
}

Plant::Plant(const SimConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
    for (std::size_t i = 0; i < kPotCount; ++i) {
        pots_[i] = PotState{cfg_.initial_moisture[i], cfg_.m_sat, cfg_.evap_factor[i]};
    }
    weather_ = step_weather(WeatherState{}, 0.0, cfg_, rng_);
    weather_.raining = false;
    weather_.rain_rate = 0.0;
}

void Plant::advance(double t, const RelayArray& valves) {
    // pots integrate over the tick with the weather that held during it
    for (std::size_t i = 0; i < kPotCount; ++i) {
        pots_[i] = step_pot(pots_[i], weather_, valves[i] == RelayState::ON, cfg_);
    }
    meter_.record(valves, sim::read_flow(valves, cfg_).flow_lpm, cfg_.dt);
    weather_ = step_weather(weather_, t, cfg_, rng_);
}

SoilArray Plant::read_soil() {
    SoilArray out{};
    for (std::size_t ch = 0; ch < kSoilChannels; ++ch) {
        const int reading = read_soil_adc(pots_[ch / 2], static_cast<int>(ch % 2), cfg_, rng_);
        out[ch] = faults_.stuck_soil[ch].value_or(reading);
    }
    return out;
}

DhtReading Plant::read_dht() const {
    if (faults_.dht_unreadable) return DhtReading{};
    return sim::read_dht(weather_);
}

void Plant::set_moisture(PotId id, double m) {
    pots_[id.index()].moisture = std::clamp(m, 0.0, pots_[id.index()].m_sat);
}

}  // namespace drip::sim
