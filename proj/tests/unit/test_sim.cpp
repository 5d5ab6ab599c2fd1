#include <doctest.h>

#include <cmath>
#include <random>

#include "drip/sim/plant.hpp"

using namespace drip;
using namespace drip::sim;

namespace {

SimConfig quiet_config() {
    SimConfig c;
    c.noise_sigma = 0.0;
    c.weather.rain_mean_interval_s = 0.0;
    return c;
}

WeatherState still_air() {
    WeatherState w;
    w.temperature_c = 0.0;  // below t0: no evaporation
    w.humidity_pct = 100.0;
    return w;
}

}  // namespace

TEST_CASE("temperature follows the diurnal sinusoid") {
    SimConfig c = quiet_config();
    Rng rng(1);
    const auto w = step_weather(WeatherState{}, 21600.0, c, rng);
    const double expected = 20.0 + 8.0 * std::sin(2.0 * M_PI * 21600.0 / 86400.0);
    CHECK(w.temperature_c == doctest::Approx(expected).epsilon(1e-12));
    CHECK(w.temperature_c == doctest::Approx(28.0));
    CHECK(w.humidity_pct == doctest::Approx(60.0 - 15.0));
    CHECK_FALSE(w.raining);
}

TEST_CASE("explicit Euler step with only irrigation inflow") {
    SimConfig c = quiet_config();
    c.q_irr = 0.001;
    c.dt = 10.0;
    c.e0 = 0.0;
    c.d = 0.0;
    PotState p{0.20, 0.45, 1.0};
    const auto next = step_pot(p, still_air(), true, c);
    CHECK(next.moisture == doctest::Approx(0.20 + 10.0 * 0.001).epsilon(1e-12));
    CHECK(next.moisture == doctest::Approx(0.21));
}

TEST_CASE("saturated pot stays at m_sat under inflow") {
    SimConfig c = quiet_config();
    PotState p{0.45, 0.45, 1.0};
    CHECK(step_pot(p, still_air(), true, c).moisture == 0.45);
}

TEST_CASE("soil ADC calibration points") {
    SimConfig c = quiet_config();
    Rng rng(3);
    CHECK(read_soil_adc(PotState{0.0, 0.45, 1.0}, 0, c, rng) == 3500);
    CHECK(read_soil_adc(PotState{0.45, 0.45, 1.0}, 1, c, rng) == 1200);
    const int mid = static_cast<int>(std::lround(3500.0 - (3500.0 - 1200.0) * 0.5));
    CHECK(read_soil_adc(PotState{0.225, 0.45, 1.0}, 0, c, rng) == mid);
    CHECK(mid == 2350);
    CHECK_THROWS_AS((void)read_soil_adc(PotState{}, 2, c, rng), Error);
}

TEST_CASE("flow meter scales with open valves") {
    SimConfig c = quiet_config();
    const RelayState on = RelayState::ON, off = RelayState::OFF;
    auto r0 = read_flow({off, off, off}, c);
    CHECK(r0.flow_lpm == 0.0);
    CHECK(r0.pulse_hz == 0.0);
    auto r1 = read_flow({on, off, off}, c);
    CHECK(r1.flow_lpm == doctest::Approx(2.0));
    CHECK(r1.pulse_hz == doctest::Approx(7.5 * 2.0));
    auto r3 = read_flow({on, on, on}, c);
    CHECK(r3.flow_lpm == doctest::Approx(6.0));
    CHECK(r3.pulse_hz == doctest::Approx(7.5 * 6.0));
}

TEST_CASE("DHT readings truncate and clamp") {
    auto r = read_dht(WeatherState{24.7, 55.2, false, 0.0});
    CHECK(r.temperature_c == 24);
    CHECK(r.humidity_pct == 55);
    CHECK(read_dht(WeatherState{20.0, 95.0, false, 0.0}).humidity_pct == 90);
    CHECK(read_dht(WeatherState{-3.0, 50.0, false, 0.0}).temperature_c == 0);
    CHECK(read_dht(WeatherState{20.0, 5.0, false, 0.0}).humidity_pct == 20);
}

TEST_CASE("config validation") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.dt = 11.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c.dt = 0.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = SimConfig{};
    c.lpm_per_valve = 11.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = SimConfig{};
    c.initial_moisture[1] = 0.9;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("property: moisture never leaves [0, m_sat] for random schedules") {
    std::mt19937_64 sched(5);
    std::bernoulli_distribution open(0.3);
    SimConfig c;
    c.q_irr = 5e-3;  // aggressive, so the upper clamp is exercised
    c.e0 = 5e-5;      // and the lower one
    c.weather.rain_mean_interval_s = 600.0;
    c.weather.rain_rate = 1e-3;
    Plant plant(c);
    for (int t = 1; t <= 20000; ++t) {
        RelayArray v{};
        for (auto& r : v) r = open(sched) ? RelayState::ON : RelayState::OFF;
        plant.advance(t, v);
        for (PotId p : all_pots()) {
            REQUIRE(plant.pot(p).moisture >= 0.0);
            REQUIRE(plant.pot(p).moisture <= plant.pot(p).m_sat);
        }
    }
}

TEST_CASE("property: same seed and schedule give bit-identical trajectories") {
    auto run = [](std::uint64_t seed) {
        SimConfig c;
        c.seed = seed;
        c.weather.rain_mean_interval_s = 900.0;
        Plant plant(c);
        std::vector<double> trace;
        for (int t = 1; t <= 3000; ++t) {
            const RelayState s = (t / 100) % 2 ? RelayState::ON : RelayState::OFF;
            plant.advance(t, {s, RelayState::OFF, s});
            const auto soil = plant.read_soil();
            for (PotId p : all_pots()) trace.push_back(plant.pot(p).moisture);
            for (int v : soil) trace.push_back(v);
            trace.push_back(plant.weather().raining ? 1.0 : 0.0);
        }
        return trace;
    };
    CHECK(run(9) == run(9));
    CHECK(run(9) != run(10));
}

TEST_CASE("property: noiseless ADC is monotone decreasing in moisture") {
    SimConfig c = quiet_config();
    Rng rng(0);
    int prev = read_soil_adc(PotState{0.0, 0.45, 1.0}, 0, c, rng);
    for (int k = 1; k <= 450; ++k) {
        const int cur = read_soil_adc(PotState{k * 0.001, 0.45, 1.0}, 0, c, rng);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("water meter matches moisture gain with losses disabled") {
    SimConfig c = quiet_config();
    c.e0 = 0.0;
    c.d = 0.0;
    c.initial_moisture = {0.0, 0.0, 0.0};
    Plant plant(c);
    std::array<int, kPotCount> open_ticks{};
    for (int t = 1; t <= 300; ++t) {
        RelayArray v{t % 3 == 0 ? RelayState::ON : RelayState::OFF, t % 2 == 0 ? RelayState::ON : RelayState::OFF,
                     RelayState::OFF};
        for (std::size_t i = 0; i < kPotCount; ++i) open_ticks[i] += v[i] == RelayState::ON;
        plant.advance(t, v);
    }
    for (PotId p : all_pots()) {
        const double gain = plant.pot(p).moisture;
        CHECK(std::abs(plant.meter().moisture_equivalent(p, c) - gain) < 1e-9);
        CHECK(std::abs(gain - c.dt * c.q_irr * open_ticks[p.index()]) < 1e-9);
    }
}

TEST_CASE("stuck channel overrides the reading") {
    Plant plant(quiet_config());
    plant.faults().stuck_soil[3] = 4095;
    const auto soil = plant.read_soil();
    CHECK(soil[3] == 4095);
    CHECK(soil[2] != 4095);
    plant.faults().dht_unreadable = true;
    CHECK(plant.read_dht().temperature_c == kDhtUnreadable);
}
